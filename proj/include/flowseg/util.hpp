#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowseg {

// Thrown for bad user input: malformed files, invalid parameters, broken
// preconditions. The CLI maps this to exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a required on-disk artifact (flow file, checkpoint, manifest)
// does not exist. The CLI maps this to exit code 2.
struct MissingArtifactError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace util {

// Deterministic RNG wrapper. Draws are derived from the raw mt19937_64 stream
// with fixed arithmetic so sequences do not depend on the standard library's
// distribution implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi] via rejection-free modulo on 64 bits.
    // Bias is < 2^-50 for the ranges used here.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(gen_() % static_cast<uint64_t>(hi - lo + 1));
    }

    // Standard normal via Box-Muller, two fresh uniforms per call.
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::mt19937_64 gen_;
};

// SplitMix64 step, used to derive independent child seeds from one master seed.
uint64_t splitmix64(uint64_t x);

// Combine a seed with a label so different pipeline stages get distinct streams.
uint64_t derive_seed(uint64_t seed, const std::string& label);

// FNV-1a 64-bit hashes; used by the completion index.
uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull);
uint64_t fnv1a64_str(const std::string& s, uint64_t h = 0xcbf29ce484222325ull);
uint64_t fnv1a64_file(const std::filesystem::path& p);

// Round half-up at `decimals` decimal places (5 at the cut digit rounds away
// from zero for positive values). Used only at report-formatting boundaries.
double round_half_up(double v, int decimals);

// Format a fraction as a percentage with two decimals, e.g. 0.75975 -> "75.98".
std::string format_pct(double fraction);

// Fixed-point formatting with half-up rounding.
std::string format_fixed(double v, int decimals);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
std::string lower(const std::string& s);
bool starts_with(const std::string& s, const std::string& prefix);

// Line-delimited log to stderr: "<ISO8601 UTC> <LEVEL> <message>".
void log_line(const char* level, const std::string& msg);
void log_info(const std::string& msg);
void log_warn(const std::string& msg);
void log_error(const std::string& msg);

// Little-endian scalar packing for the binary containers.
void put_u32le(std::vector<uint8_t>& out, uint32_t v);
void put_i32le(std::vector<uint8_t>& out, int32_t v);
void put_u64le(std::vector<uint8_t>& out, uint64_t v);
void put_f32le(std::vector<uint8_t>& out, float v);
void put_f64le(std::vector<uint8_t>& out, double v);

// Cursor-based readers; throw ValidationError on truncation.
struct ByteReader {
    const uint8_t* data;
    size_t size;
    size_t pos = 0;

    void need(size_t n) const;
    uint32_t u32le();
    int32_t i32le();
    uint64_t u64le();
    float f32le();
    double f64le();
    void bytes(void* dst, size_t n);
};

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& p);
void write_file_bytes(const std::filesystem::path& p, const std::vector<uint8_t>& bytes);

} // namespace util
} // namespace flowseg
