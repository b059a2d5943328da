// Credential classification. Recovered secrets are classified by shape and
// source column; no hash algorithm is ever asserted, only the digest length.

#pragma once

#include <string>
#include <string_view>

namespace mhf {

enum class CredentialType {
    PlaintextPassword,
    PlaintextPin,
    HashedDigest,
    DiaryPassword,
    SecretQA,
    NotProtected,
};

struct CredentialKind {
    CredentialType type = CredentialType::PlaintextPassword;
    // Observed digest string length; meaningful for HashedDigest only.
    int hex_length = 0;

    // Stable lowercase identifier, e.g. "plaintext-pin", "hashed-digest-40".
    std::string slug() const;

    bool operator==(const CredentialKind&) const = default;
};

struct CredentialClass {
    CredentialKind kind;
    // Set when the field context promised a shape the value does not have
    // (e.g. a pincode column holding something other than 4 digits).
    bool shape_warning = false;
};

// Deterministic classification from the raw value and the source column
// name. Never fails; unknown shapes fall back to PlaintextPassword with the
// warning flag set.
CredentialClass classify_credential(std::string_view raw,
                                    std::string_view field_context);

bool is_hex_string(std::string_view s);

} // namespace mhf
