#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lix/keyset.hpp"

namespace lix {

// SOSD binary layout: 8-byte little-endian count, then count little-endian
// values of the declared width (4 or 8 bytes).
struct DatasetSpec {
    std::string name;
    unsigned value_width = 8;
    std::uint64_t declared_count = 0; // 0 = take from the file header
    std::uint64_t declared_bytes = 0; // 0 = skip the size check
    std::string md5;                  // empty = skip the digest check
};

// The four reference datasets with their published sizes and digests.
const std::vector<DatasetSpec>& known_datasets();
const DatasetSpec* find_dataset(const std::string& name);

struct IngestReport {
    std::size_t duplicates = 0;
    bool md5_checked = false;
    std::uint64_t file_bytes = 0;
};

// Reads, validates, sorts and dedup-collapses a SOSD file into a KeySet.
// 32-bit values are widened to 64-bit keys. Size or digest mismatches raise
// data_error.
KeySet ingest_sosd(const std::string& path, const DatasetSpec& spec, bool verify_md5,
                   IngestReport* report = nullptr);

// Writes keys in SOSD layout (the round-trip inverse of ingest_sosd).
void write_sosd(const std::string& path, std::span<const Key> keys, unsigned value_width);

std::string md5_hex_of_file(const std::string& path);

// Deterministic 1024-key extraction: keys at indices floor(i*n/k), forward
// filled to the next distinct key; all keys when n < k.
KeySet extract_keys(const KeySet& ks, std::size_t k = 1024);

} // namespace lix
