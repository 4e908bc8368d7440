#include "lix/sosd.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "lix/errors.hpp"

namespace lix {

const std::vector<DatasetSpec>& known_datasets() {
    static const std::vector<DatasetSpec> specs = {
        {"books_200M_uint32", 4, 200000000ull, 800000008ull, "55845580be1554d82be1c0dda416005c"},
        {"fb_200M_uint64", 8, 200000000ull, 1600000008ull, "679eff3bfbc80572b30f6575b40b6918"},
        {"wiki_ts_200M_uint64", 8, 200000000ull, 1600000008ull,
         "4f1402b1c476d67f77d2da4955432f7d"},
        {"osm_cellids_800M_uint64", 8, 800000000ull, 6400000008ull,
         "70670bf41196b9591e07d0128a281b9a"},
    };
    return specs;
}

const DatasetSpec* find_dataset(const std::string& name) {
    for (const auto& d : known_datasets())
        if (d.name == name) return &d;
    return nullptr;
}

std::string md5_hex_of_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("md5: cannot open " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_md5(), nullptr) != 1)
        throw data_error("md5: digest init failed");
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        std::streamsize got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got)) != 1)
            throw data_error("md5: digest update failed");
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw data_error("md5: digest final failed");
    std::string hex;
    char b[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(b, sizeof b, "%02x", digest[i]);
        hex += b;
    }
    return hex;
}

KeySet ingest_sosd(const std::string& path, const DatasetSpec& spec, bool verify_md5,
                   IngestReport* report) {
    if (spec.value_width != 4 && spec.value_width != 8)
        throw data_error("ingest: value width must be 4 or 8");
    std::error_code ec;
    std::uint64_t fsize = std::filesystem::file_size(path, ec);
    if (ec) throw data_error("ingest: cannot stat " + path);

    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("ingest: cannot open " + path);
    std::uint64_t count = 0;
    unsigned char hdr[8];
    if (!in.read(reinterpret_cast<char*>(hdr), 8)) throw data_error("ingest: truncated header");
    for (int i = 7; i >= 0; --i) count = (count << 8) | hdr[i];

    if (spec.declared_count && count != spec.declared_count)
        throw data_error("ingest: header count mismatch for " + spec.name);
    std::uint64_t expect_bytes = 8 + count * spec.value_width;
    if (fsize != expect_bytes) throw data_error("ingest: file size mismatch for " + path);
    if (spec.declared_bytes && fsize != spec.declared_bytes)
        throw data_error("ingest: declared size mismatch for " + spec.name);

    if (report) {
        report->file_bytes = fsize;
        report->md5_checked = false;
    }
    if (verify_md5 && !spec.md5.empty()) {
        std::string got = md5_hex_of_file(path);
        if (got != spec.md5)
            throw data_error("ingest: md5 mismatch for " + spec.name + " (" + got + ")");
        if (report) report->md5_checked = true;
    }

    std::vector<Key> keys(count);
    if (spec.value_width == 8) {
        std::vector<unsigned char> buf(count * 8);
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
            throw data_error("ingest: truncated data");
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint64_t v = 0;
            for (int b = 7; b >= 0; --b) v = (v << 8) | buf[i * 8 + static_cast<unsigned>(b)];
            keys[i] = v;
        }
    } else {
        std::vector<unsigned char> buf(count * 4);
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
            throw data_error("ingest: truncated data");
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint32_t v = 0;
            for (int b = 3; b >= 0; --b) v = (v << 8) | buf[i * 4 + static_cast<unsigned>(b)];
            keys[i] = v; // widened on ingest
        }
    }
    std::size_t dups = 0;
    KeySet ks = KeySet::from_unsorted(std::move(keys), &dups);
    if (report) report->duplicates = dups;
    return ks;
}

void write_sosd(const std::string& path, std::span<const Key> keys, unsigned value_width) {
    if (value_width != 4 && value_width != 8)
        throw data_error("write_sosd: value width must be 4 or 8");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("write_sosd: cannot open " + path);
    std::uint64_t count = keys.size();
    unsigned char hdr[8];
    for (int i = 0; i < 8; ++i) hdr[i] = static_cast<unsigned char>((count >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<char*>(hdr), 8);
    for (Key k : keys) {
        if (value_width == 4 && k > 0xffffffffull)
            throw data_error("write_sosd: key exceeds 32-bit width");
        unsigned char v[8];
        for (unsigned i = 0; i < value_width; ++i)
            v[i] = static_cast<unsigned char>((k >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<char*>(v), value_width);
    }
    if (!out) throw data_error("write_sosd: write failed");
}

KeySet extract_keys(const KeySet& ks, std::size_t k) {
    const std::size_t n = ks.size();
    if (n == 0) throw std::invalid_argument("extract_keys: empty key set");
    if (n <= k) {
        std::vector<Key> all(ks.keys().begin(), ks.keys().end());
        return KeySet::from_sorted(std::move(all));
    }
    std::vector<Key> out;
    out.reserve(k);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t want = i * n / k;
        if (want < idx) want = idx; // forward fill past already-taken keys
        if (want >= n) break;
        out.push_back(ks[want]);
        idx = want + 1;
    }
    return KeySet::from_sorted(std::move(out));
}

} // namespace lix
