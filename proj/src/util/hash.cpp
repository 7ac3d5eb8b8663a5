#include "netfeat/util/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace netfeat::util {

namespace {

std::string digest_hex(const void* data, std::size_t size, const EVP_MD* md)
{
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data, size, out, &len, md, nullptr) != 1)
        throw std::runtime_error("OpenSSL digest failed");
    return to_hex({out, len});
}

} // namespace

std::string to_hex(std::span<const std::uint8_t> data)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out += kDigits[b >> 4];
        out += kDigits[b & 0x0f];
    }
    return out;
}

std::string sha256_hex(std::span<const std::uint8_t> data) { return digest_hex(data.data(), data.size(), EVP_sha256()); }

std::string sha256_hex(std::string_view text) { return digest_hex(text.data(), text.size(), EVP_sha256()); }

std::string md5_hex(std::string_view text) { return digest_hex(text.data(), text.size(), EVP_md5()); }

} // namespace netfeat::util
