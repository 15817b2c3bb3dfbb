#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "bkh/common.hpp"
#include "bkh/grid.hpp"
#include "bkh/solutions.hpp"

namespace bkh {

// Multiplicity maps are the one expensive reusable intermediate; they are
// persisted sparsely, keyed by a digest of (spec universe, h, A bits).
// A corrupt or mismatched file is rebuilt, never trusted.

struct CacheInfo {
    bool hit = false;
    bool rebuilt_corrupt = false;
    std::string path;
};

namespace detail {

constexpr char kCacheMagic[8] = {'B', 'K', 'H', 'M', 'M', '0', '1', '\n'};

inline u64 cache_key(const PointSet& A, int h) {
    u64 k = A.digest();
    return fnv1a_pod(h, k);
}

inline void put_u64(std::string& out, u64 v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline bool get_u64(const std::string& in, std::size_t& at, u64& v) {
    if (at + 8 > in.size()) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= u64(static_cast<unsigned char>(in[at + std::size_t(i)])) << (8 * i);
    at += 8;
    return true;
}

} // namespace detail

inline std::string cache_file_path(const std::string& dir, const PointSet& A, int h) {
    std::ostringstream name;
    name << dir << "/mm_" << std::hex << detail::cache_key(A, h) << ".bin";
    return name.str();
}

inline std::optional<MultiplicityMap> cache_load(const std::string& path, const PointSet& A,
                                                 int h) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t at = 0;
    if (data.size() < 8 || std::memcmp(data.data(), detail::kCacheMagic, 8) != 0)
        return std::nullopt;
    at = 8;
    u64 key = 0, base = 0, cells = 0, nonzero = 0;
    if (!detail::get_u64(data, at, key) || key != detail::cache_key(A, h)) return std::nullopt;
    if (!detail::get_u64(data, at, base) || !detail::get_u64(data, at, cells) ||
        !detail::get_u64(data, at, nonzero))
        return std::nullopt;
    if (data.size() != at + nonzero * 16 + 8) return std::nullopt;
    u64 checksum = fnv1a(data.data(), data.size() - 8);
    std::size_t tail = data.size() - 8;
    u64 stored = 0;
    if (!detail::get_u64(data, tail, stored) || stored != checksum) return std::nullopt;
    MultiplicityMap mm;
    mm.spec = A.spec();
    mm.h = h;
    mm.source_digest = A.digest();
    mm.base = i64(base);
    mm.counts.assign(std::size_t(cells), 0);
    for (u64 i = 0; i < nonzero; ++i) {
        u64 idx = 0, val = 0;
        if (!detail::get_u64(data, at, idx) || !detail::get_u64(data, at, val)) return std::nullopt;
        if (idx >= cells) return std::nullopt;
        mm.counts[std::size_t(idx)] = val;
    }
    return mm;
}

inline void cache_store(const std::string& path, const PointSet& A, const MultiplicityMap& mm) {
    std::string data(detail::kCacheMagic, 8);
    detail::put_u64(data, detail::cache_key(A, mm.h));
    detail::put_u64(data, u64(mm.base));
    detail::put_u64(data, u64(mm.counts.size()));
    u64 nonzero = 0;
    for (u64 c : mm.counts)
        if (c) ++nonzero;
    detail::put_u64(data, nonzero);
    for (std::size_t i = 0; i < mm.counts.size(); ++i)
        if (mm.counts[i]) {
            detail::put_u64(data, u64(i));
            detail::put_u64(data, mm.counts[i]);
        }
    detail::put_u64(data, fnv1a(data.data(), data.size()));
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw capacity_error("cache_store: cache directory not writable: " + path);
        out.write(data.data(), std::streamsize(data.size()));
    }
    std::filesystem::rename(tmp, path);
}

// Build-or-load entry point. Never fails because of the cache: any problem
// falls back to a rebuild (and rewrites the file).
inline MultiplicityMap cached_multiplicity_map(const PointSet& A, int h, const SolveOptions& opts,
                                               const std::string& cache_dir, CacheInfo* info) {
    CacheInfo local;
    if (cache_dir.empty()) {
        if (info) *info = local;
        return multiplicity_map(A, h, opts);
    }
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    local.path = cache_file_path(cache_dir, A, h);
    bool existed = std::filesystem::exists(local.path);
    if (existed) {
        if (auto loaded = cache_load(local.path, A, h)) {
            local.hit = true;
            if (info) *info = local;
            return *loaded;
        }
        local.rebuilt_corrupt = true;
    }
    auto mm = multiplicity_map(A, h, opts);
    cache_store(local.path, A, mm);
    if (info) *info = local;
    return mm;
}

} // namespace bkh
