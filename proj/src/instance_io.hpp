#pragma once

#include <optional>
#include <string>
#include <vector>

#include "convexdl/affine.hpp"
#include "convexdl/cli_reports.hpp"
#include "convexdl/field.hpp"
#include "convexdl/ha_space.hpp"

namespace convexdl::io {

// Collects schema errors with JSON-pointer paths; finish() throws UsageError if any.
class Schema {
 public:
  void fail(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }
  bool ok() const { return errors_.empty(); }
  void finish() const;

  const Json* get(const Json& obj, const std::string& path, const std::string& key, bool required = true);
  std::optional<long long> integer(const Json& obj, const std::string& path, const std::string& key, long long lo,
                                   long long hi, std::optional<long long> fallback = std::nullopt);
  std::optional<bool> boolean(const Json& obj, const std::string& path, const std::string& key,
                              std::optional<bool> fallback = std::nullopt);
  std::optional<std::vector<int>> int_list(const Json& v, const std::string& path);
  void reject_unknown(const Json& obj, const std::string& path, const std::vector<std::string>& allowed);

 private:
  std::vector<std::string> errors_;
};

std::string join(const std::string& path, const std::string& key);
std::string join(const std::string& path, std::size_t index);

// Reduced word (1-based labels) of the W-part of x.
std::vector<int> weyl_word(const TwistedElement& x);

Json cartan_json(const RootSystem& rs);  // code when it has one, else {"cartan_matrix": ...}
RootSystemPtr read_cartan(Schema& s, const Json& v, const std::string& path);
std::optional<DiagramAut> read_sigma(Schema& s, const RootSystem& rs, const Json& v, const std::string& path);

Json element_json(const TwistedElement& x);  // {"word": [...], "sigma_power": k}
std::optional<TwistedElement> read_element(Schema& s, const RootSystemPtr& rs, const DiagramAut& sigma, const Json& v,
                                           const std::string& path);

Json field_json(const Field& f);
std::optional<FieldSpec> read_field(Schema& s, const Json& v, const std::string& path);

Json elem_json(const Field& f, Elem a);  // coefficient list
std::optional<Elem> read_elem(Schema& s, const Field& f, const Json& v, const std::string& path);

// Sparse {"root index": coefficients}, zero entries omitted.
Json vector_json(const Field& f, const HAVector& v);
std::optional<HAVector> read_vector(Schema& s, const Field& f, int num_roots, const Json& v, const std::string& path);

Json setup_json(const HASetupInput& in);
std::optional<HASetupInput> read_setup(Schema& s, const RootSystemPtr& rs, const DiagramAut& sigma, const FieldSpec& f,
                                       const Json& v, const std::string& path);

Json rationals_json(const std::vector<Rational>& v);
std::optional<std::vector<Rational>> read_rationals(Schema& s, const Json& v, const std::string& path);

Json howe_json(const HoweDatum& h);
std::optional<HoweDatum> read_howe(Schema& s, const RootSystemPtr& rs, const Json& v, const std::string& path);

}  // namespace convexdl::io
