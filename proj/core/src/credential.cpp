#include "mhf/credential.hpp"

#include <algorithm>
#include <cctype>

namespace mhf {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

bool is_decimal_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return c >= '0' && c <= '9';
    });
}

} // namespace

bool is_hex_string(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isxdigit(c) != 0;
    });
}

std::string CredentialKind::slug() const {
    switch (type) {
    case CredentialType::PlaintextPassword: return "plaintext-password";
    case CredentialType::PlaintextPin: return "plaintext-pin";
    case CredentialType::HashedDigest:
        return "hashed-digest-" + std::to_string(hex_length);
    case CredentialType::DiaryPassword: return "diary-password";
    case CredentialType::SecretQA: return "secret-qa";
    case CredentialType::NotProtected: return "not-protected";
    }
    return "unknown";
}

CredentialClass classify_credential(std::string_view raw,
                                    std::string_view field_context) {
    const std::string ctx = lower(field_context);
    CredentialClass out;

    const bool diary = ctx.find("diary_password") != std::string::npos ||
                       ctx.find("diary password") != std::string::npos;
    const bool pin = !diary && ctx.find("pin") != std::string::npos;
    const bool secret = ctx.find("question") != std::string::npos ||
                        ctx.find("answer") != std::string::npos ||
                        ctx.find("secret") != std::string::npos;

    if (raw.empty()) {
        // An empty stored value means the protection was never set.
        out.kind.type = CredentialType::NotProtected;
        return out;
    }
    if (diary) {
        out.kind.type = CredentialType::DiaryPassword;
        return out;
    }
    if (pin) {
        if (raw.size() == 4 && is_decimal_digits(raw)) {
            out.kind.type = CredentialType::PlaintextPin;
        } else {
            out.kind.type = CredentialType::PlaintextPassword;
            out.shape_warning = true;
        }
        return out;
    }
    if (secret) {
        out.kind.type = CredentialType::SecretQA;
        return out;
    }
    // Digest length alone decides the hashed classification; the algorithm
    // is never asserted.
    if ((raw.size() == 32 || raw.size() == 40 || raw.size() == 64) &&
        is_hex_string(raw)) {
        out.kind.type = CredentialType::HashedDigest;
        out.kind.hex_length = static_cast<int>(raw.size());
        return out;
    }
    out.kind.type = CredentialType::PlaintextPassword;
    return out;
}

} // namespace mhf
