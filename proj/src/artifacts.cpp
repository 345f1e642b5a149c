#include "flowseg/artifacts.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>

#include "flowseg/util.hpp"

namespace fs = std::filesystem;

namespace flowseg {

std::string ArtifactPaths::flo_path(int offset, int case_id, int clip_id,
                                    int frame_index) const {
    return flow_dir(offset) + "/case" + std::to_string(case_id) + "/clip" +
           std::to_string(clip_id) + "/frame" + std::to_string(frame_index) + ".flo";
}

std::string ArtifactPaths::repr_path(int offset, const std::string& encoding, int case_id,
                                     int clip_id, int frame_index, const std::string& ext) const {
    return repr_dir(offset, encoding) + "/case" + std::to_string(case_id) + "/clip" +
           std::to_string(clip_id) + "/frame" + std::to_string(frame_index) + ext;
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw ValidationError("cannot create directory " + path + ": " + ec.message());
    if (!fs::is_directory(path))
        throw ValidationError(path + " exists but is not a directory");
}

void ensure_parent_dir(const std::string& file_path) {
    const fs::path parent = fs::path(file_path).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());
}

CompletionIndex::CompletionIndex(std::string path) : path_(std::move(path)) {}

void CompletionIndex::load() {
    entries_.clear();
    if (!fs::exists(path_)) return;
    const std::vector<uint8_t> bytes = util::read_file_bytes(path_);
    const std::string text(bytes.begin(), bytes.end());
    size_t lineno = 0;
    for (const std::string& line : util::split(text, '\n')) {
        ++lineno;
        const std::string t = util::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::vector<std::string> cols = util::split(t, '\t');
        uint64_t hash = 0;
        if (cols.size() != 2 || std::sscanf(cols[1].c_str(), "%" SCNx64, &hash) != 1)
            throw ValidationError(path_ + ":" + std::to_string(lineno) +
                                  ": malformed completion index line");
        entries_[cols[0]] = hash;
    }
}

void CompletionIndex::save() const {
    std::string out = "# key\tfnv1a64(artifact)\n";
    char buf[32];
    for (const auto& [key, hash] : entries_) {
        std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash);
        out += key + "\t" + buf + "\n";
    }
    std::vector<uint8_t> bytes(out.begin(), out.end());
    ensure_parent_dir(path_);
    util::write_file_bytes(path_, bytes);
}

bool CompletionIndex::fresh(const std::string& key, const std::string& artifact) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return false;
    if (!fs::exists(artifact)) return false;
    return util::fnv1a64_file(artifact) == it->second;
}

void CompletionIndex::mark(const std::string& key, const std::string& artifact) {
    entries_[key] = util::fnv1a64_file(artifact);
}

} // namespace flowseg
