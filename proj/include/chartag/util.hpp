#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace chartag {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit digest, used for input manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Worker count for read-only evaluation fan-out. Defaults to the hardware
// concurrency, capped by the CHARTAG_THREADS environment variable.
int eval_threads();

// Runs fn(i) for i in [0,n) across up to `threads` workers. fn must be
// safe to call concurrently for distinct i. Exceptions from workers are
// rethrown on the caller thread.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

std::vector<std::string> split_ws(const std::string& line);
std::string lower_ascii(std::string s);
std::string trim(const std::string& s);

// Splits a UTF-8 string into code-point substrings. Invalid bytes are
// passed through as single-byte units.
std::vector<std::string> utf8_chars(const std::string& s);

}  // namespace chartag
