// SHA-256, used to pin evidence-file integrity before and after a run.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace mhf {

class Sha256 {
public:
    Sha256();

    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    // Finalizes and returns the digest as 64 lowercase hex characters.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::uint64_t total_len_ = 0;
    std::size_t buffer_len_ = 0;
};

std::string sha256_hex(std::string_view data);

// Streams the file; throws std::runtime_error when unreadable.
std::string sha256_file(const std::filesystem::path& path);

} // namespace mhf
