// Command line front end and certificate (de)serialization.
#pragma once
#include "json.hpp"

#include "config.hpp"
#include "refine.hpp"
#include "subtype.hpp"

namespace stc {

int cli_main(int argc, const char* const* argv);

nlohmann::json refinement_cert_json(const RefinementCertificate& c);
nlohmann::json negation_json(const NegationDerivation& d);
nlohmann::json subtype_cert_json(TypeRef lhs, TypeRef rhs,
                                 const SubtypeCertificate& c);

RefinementCertificate refinement_cert_from_json(const nlohmann::json& j);
NegationDerivation negation_from_json(const nlohmann::json& j);

// Re-validates any serialized certificate; fills diag on failure.
bool certify_json(const nlohmann::json& j, const RunConfig& cfg,
                  std::string* diag);

}  // namespace stc
