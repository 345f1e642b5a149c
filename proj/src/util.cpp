#include "flowseg/util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>

namespace flowseg::util {

double Rng::normal() {
    // Box-Muller; clamp u1 away from 0 so log() stays finite.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t seed, const std::string& label) {
    return splitmix64(seed ^ fnv1a64_str(label));
}

uint64_t fnv1a64(const void* data, size_t n, uint64_t h) {
    const auto* p = static_cast<const uint8_t*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t fnv1a64_str(const std::string& s, uint64_t h) {
    return fnv1a64(s.data(), s.size(), h);
}

uint64_t fnv1a64_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw MissingArtifactError("cannot open file for hashing: " + p.string());
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
    return h;
}

double round_half_up(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::floor(v * scale + 0.5) / scale;
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, round_half_up(v, decimals));
    return buf;
}

std::string format_pct(double fraction) {
    return format_fixed(fraction * 100.0, 2);
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t p = s.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, p - start));
        start = p + 1;
    }
    return out;
}

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

void log_line(const char* level, const std::string& msg) {
    static std::mutex mu;
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto t = system_clock::to_time_t(now);
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char ts[40];
    std::snprintf(ts, sizeof ts, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms));
    std::lock_guard<std::mutex> lock(mu);
    std::fprintf(stderr, "%s %s %s\n", ts, level, msg.c_str());
}

void log_info(const std::string& msg) { log_line("INFO", msg); }
void log_warn(const std::string& msg) { log_line("WARN", msg); }
void log_error(const std::string& msg) { log_line("ERROR", msg); }

void put_u32le(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

void put_i32le(std::vector<uint8_t>& out, int32_t v) {
    put_u32le(out, static_cast<uint32_t>(v));
}

void put_u64le(std::vector<uint8_t>& out, uint64_t v) {
    put_u32le(out, static_cast<uint32_t>(v));
    put_u32le(out, static_cast<uint32_t>(v >> 32));
}

void put_f32le(std::vector<uint8_t>& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32le(out, bits);
}

void put_f64le(std::vector<uint8_t>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64le(out, bits);
}

void ByteReader::need(size_t n) const {
    if (pos + n > size) throw ValidationError("truncated payload");
}

uint32_t ByteReader::u32le() {
    need(4);
    uint32_t v = static_cast<uint32_t>(data[pos]) | static_cast<uint32_t>(data[pos + 1]) << 8 |
                 static_cast<uint32_t>(data[pos + 2]) << 16 |
                 static_cast<uint32_t>(data[pos + 3]) << 24;
    pos += 4;
    return v;
}

int32_t ByteReader::i32le() { return static_cast<int32_t>(u32le()); }

uint64_t ByteReader::u64le() {
    uint64_t lo = u32le();
    uint64_t hi = u32le();
    return lo | hi << 32;
}

float ByteReader::f32le() {
    uint32_t bits = u32le();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

double ByteReader::f64le() {
    uint64_t bits = u64le();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void ByteReader::bytes(void* dst, size_t n) {
    need(n);
    std::memcpy(dst, data + pos, n);
    pos += n;
}

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary | std::ios::ate);
    if (!in) throw MissingArtifactError("cannot open file: " + p.string());
    const auto n = static_cast<size_t>(in.tellg());
    std::vector<uint8_t> bytes(n);
    in.seekg(0);
    if (n > 0) in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
    if (!in) throw ValidationError("short read: " + p.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& p, const std::vector<uint8_t>& bytes) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open file for writing: " + p.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ValidationError("short write: " + p.string());
}

} // namespace flowseg::util
