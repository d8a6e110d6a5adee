// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/digest.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <memory>

#include <openssl/evp.h>

#include "pulsecal/error.hpp"

namespace pulsecal {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX *ctx) const { EVP_MD_CTX_free(ctx); }
};

std::string to_hex(const unsigned char *bytes, unsigned int len)
{
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[bytes[i] >> 4]);
        out.push_back(kHex[bytes[i] & 0xf]);
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view data)
{
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
        throw Error("SHA-256 computation failed");
    }
    return to_hex(md.data(), len);
}

std::string file_sha256(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(content);
}

std::string combined_digest(std::span<const std::filesystem::path> paths)
{
    std::string joined;
    for (const auto &p : paths) {
        joined += file_sha256(p);
        joined += '\n';
    }
    return sha256_hex(joined);
}

}  // namespace pulsecal
