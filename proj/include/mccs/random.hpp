#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace mccs {

/// Deterministic per-key random stream (splitmix64 counter + Box-Muller).
/// Streams are keyed by content, never by thread or call order.
class StreamRng {
public:
    explicit StreamRng(std::uint64_t key) : state_(key) {}
    std::uint64_t next();
    double uniform();  // open interval (0, 1)
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Stable mixing of several integers into a stream key.
std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts);
/// FNV-1a.
std::uint64_t hash_string(std::string_view s);

}  // namespace mccs
