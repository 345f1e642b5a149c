#include "flowseg/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "flowseg/png_io.hpp"

namespace fs = std::filesystem;

namespace flowseg {

ClassMap::ClassMap() { to_class.fill(-1); }

ClassMap ClassMap::surgical_default() {
    ClassMap m;
    for (int raw = 0; raw < 13; ++raw) m.to_class[raw] = kBackground;
    m.to_class[5] = kGrasper;
    m.to_class[9] = kLhook;
    return m;
}

ClassMap ClassMap::identity() {
    ClassMap m;
    m.to_class[0] = kBackground;
    m.to_class[1] = kGrasper;
    m.to_class[2] = kLhook;
    return m;
}

ClassMap ClassMap::parse(const std::string& text) {
    std::string t = util::lower(util::trim(text));
    if (t.empty() || t == "surgical") return surgical_default();
    if (t == "identity") return identity();
    ClassMap m;
    m.to_class.fill(0);
    for (const std::string& pair : util::split(t, ',')) {
        auto kv = util::split(util::trim(pair), ':');
        if (kv.size() != 2)
            throw ValidationError("class map entry '" + pair + "' is not raw:class");
        int raw, cls;
        try {
            raw = std::stoi(kv[0]);
            cls = std::stoi(kv[1]);
        } catch (const std::exception&) {
            throw ValidationError("class map entry '" + pair + "' is not numeric");
        }
        if (raw < 0 || raw > 255) throw ValidationError("class map raw label out of range: " + kv[0]);
        if (cls < 0 || cls >= kNumClasses)
            throw ValidationError("class map target out of range: " + kv[1]);
        m.to_class[raw] = static_cast<int8_t>(cls);
    }
    validate_class_map(m);
    return m;
}

void validate_class_map(const ClassMap& m) {
    int instruments = 0;
    bool seen[kNumClasses] = {false, false, false};
    for (int raw = 0; raw < 256; ++raw) {
        if (m.to_class[raw] < 0) continue;
        seen[m.to_class[raw]] = true;
        if (m.to_class[raw] != kBackground) ++instruments;
    }
    if (!seen[kBackground] || !seen[kGrasper] || !seen[kLhook])
        throw ValidationError("class map must cover background and both instrument classes");
    if (instruments != 2)
        throw ValidationError("class map must assign exactly two raw labels to instruments");
}

LabelMask remap_mask(const LabelMask& raw, const ClassMap& m) {
    size_t unmapped_count = 0;
    int unmapped_label = -1;
    LabelMask out(raw.width, raw.height);
    for (size_t i = 0; i < raw.pixel_count(); ++i) {
        const int8_t cls = m.to_class[raw.labels[i]];
        if (cls < 0) {
            ++unmapped_count;
            unmapped_label = raw.labels[i];
            continue;
        }
        out.labels[i] = static_cast<uint8_t>(cls);
    }
    if (unmapped_count > 0)
        throw ValidationError("mask contains unmapped raw label " +
                              std::to_string(unmapped_label) + " (" +
                              std::to_string(unmapped_count) + " pixels)");
    return out;
}

size_t DatasetManifest::frame_count() const {
    size_t n = 0;
    for (const auto& c : cases)
        for (const auto& clip : c.clips) n += clip.frames.size();
    return n;
}

void validate_manifest(const DatasetManifest& m) {
    std::set<int> seen_cases;
    for (const auto& c : m.cases) {
        if (!seen_cases.insert(c.case_id).second)
            throw ValidationError("manifest lists case " + std::to_string(c.case_id) + " twice");
        std::set<int> seen_clips;
        for (const auto& clip : c.clips) {
            if (!seen_clips.insert(clip.clip_id).second)
                throw ValidationError("manifest lists clip " + std::to_string(clip.clip_id) +
                                      " of case " + std::to_string(c.case_id) + " twice");
            if (clip.frames.empty())
                throw ValidationError("empty clip " + std::to_string(clip.clip_id) + " in case " +
                                      std::to_string(c.case_id));
            for (size_t i = 1; i < clip.frames.size(); ++i)
                if (clip.frames[i].index != clip.frames[i - 1].index + 1)
                    throw ValidationError(
                        "clip " + std::to_string(clip.clip_id) + " of case " +
                        std::to_string(c.case_id) + " has a frame gap at index " +
                        std::to_string(clip.frames[i - 1].index));
        }
    }
}

std::string expand_template(const std::string& tmpl, int frame_number) {
    const size_t pos = tmpl.find("{n}");
    if (pos == std::string::npos)
        throw ValidationError("filename template '" + tmpl + "' lacks a {n} placeholder");
    return tmpl.substr(0, pos) + std::to_string(frame_number) + tmpl.substr(pos + 3);
}

namespace {

// Matches a file name against prefix{n}suffix; returns the frame number or -1.
int match_template(const std::string& tmpl, const std::string& name) {
    const size_t pos = tmpl.find("{n}");
    if (pos == std::string::npos) return -1;
    const std::string prefix = tmpl.substr(0, pos);
    const std::string suffix = tmpl.substr(pos + 3);
    if (name.size() <= prefix.size() + suffix.size()) return -1;
    if (name.compare(0, prefix.size(), prefix) != 0) return -1;
    if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) return -1;
    const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](char ch) { return ch >= '0' && ch <= '9'; }))
        return -1;
    return std::stoi(digits);
}

// video<number>, optionally zero-padded.
bool parse_case_dir(const std::string& name, int& case_id) {
    if (name.rfind("video", 0) != 0) return false;
    const std::string digits = name.substr(5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](char ch) { return ch >= '0' && ch <= '9'; }))
        return false;
    case_id = std::stoi(digits);
    return true;
}

bool parse_clip_dir(const std::string& name, int& clip_id) {
    const size_t us = name.rfind('_');
    if (us == std::string::npos) return false;
    const std::string digits = name.substr(us + 1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](char ch) { return ch >= '0' && ch <= '9'; }))
        return false;
    clip_id = std::stoi(digits);
    return true;
}

} // namespace

DatasetManifest build_manifest(const std::string& root, const FilenameTemplates& names,
                               const ClassMap& map) {
    validate_class_map(map);
    if (!fs::is_directory(root)) throw MissingArtifactError("dataset root not found: " + root);

    DatasetManifest m;
    m.root = root;
    std::map<int, fs::path> case_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        int case_id;
        if (entry.is_directory() && parse_case_dir(entry.path().filename().string(), case_id))
            case_dirs[case_id] = entry.path();
    }
    if (case_dirs.empty())
        throw ValidationError("no video<case> directories under " + root);

    for (const auto& [case_id, case_dir] : case_dirs) {
        CaseRecord cr;
        cr.case_id = case_id;
        std::map<int, fs::path> clip_dirs;
        for (const auto& entry : fs::directory_iterator(case_dir)) {
            int clip_id;
            if (entry.is_directory() && parse_clip_dir(entry.path().filename().string(), clip_id))
                clip_dirs[clip_id] = entry.path();
        }
        for (const auto& [clip_id, clip_dir] : clip_dirs) {
            ClipRecord clip;
            clip.clip_id = clip_id;
            std::map<int, std::string> frame_files;
            for (const auto& entry : fs::directory_iterator(clip_dir)) {
                const int n = match_template(names.image, entry.path().filename().string());
                if (n >= 0) frame_files[n] = entry.path().filename().string();
            }
            for (const auto& [n, image_name] : frame_files) {
                FrameRecord fr;
                fr.index = n;
                const fs::path rel = fs::relative(clip_dir, root) / image_name;
                fr.image_path = rel.generic_string();
                const fs::path mask_rel =
                    fs::relative(clip_dir, root) / expand_template(names.mask, n);
                fr.mask_path = mask_rel.generic_string();
                const fs::path mask_abs = fs::path(root) / fr.mask_path;
                if (!fs::exists(mask_abs))
                    throw MissingArtifactError("mask missing for frame " + fr.image_path + ": " +
                                               mask_abs.string());
                LabelMask remapped;
                try {
                    remapped = remap_mask(read_mask_png(mask_abs.string()), map);
                } catch (const ValidationError& e) {
                    throw ValidationError(std::string("frame ") + fr.image_path + ": " + e.what());
                }
                for (uint8_t label : remapped.labels) {
                    if (label == kGrasper) fr.has_grasper = true;
                    if (label == kLhook) fr.has_lhook = true;
                }
                clip.frames.push_back(std::move(fr));
            }
            if (!clip.frames.empty()) cr.clips.push_back(std::move(clip));
        }
        if (!cr.clips.empty()) m.cases.push_back(std::move(cr));
    }
    validate_manifest(m);
    return m;
}

void write_manifest(const DatasetManifest& m, const std::string& path) {
    std::ostringstream out;
    out << "# root: " << m.root << '\n';
    out << "# case\tclip\tindex\timage\tmask\tgrasper\tlhook\n";
    for (const auto& c : m.cases)
        for (const auto& clip : c.clips)
            for (const auto& fr : clip.frames)
                out << c.case_id << '\t' << clip.clip_id << '\t' << fr.index << '\t'
                    << fr.image_path << '\t' << fr.mask_path << '\t' << (fr.has_grasper ? 1 : 0)
                    << '\t' << (fr.has_lhook ? 1 : 0) << '\n';
    const std::string text = out.str();
    util::write_file_bytes(path, std::vector<uint8_t>(text.begin(), text.end()));
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("manifest not found: " + path);

    DatasetManifest m;
    CaseRecord* cur_case = nullptr;
    ClipRecord* cur_clip = nullptr;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            if (util::starts_with(line, "# root: ")) m.root = line.substr(8);
            continue;
        }
        const auto cols = util::split(line, '\t');
        if (cols.size() != 7)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected 7 tab-separated columns");
        FrameRecord fr;
        int case_id, clip_id;
        try {
            case_id = std::stoi(cols[0]);
            clip_id = std::stoi(cols[1]);
            fr.index = std::stoi(cols[2]);
            fr.has_grasper = std::stoi(cols[5]) != 0;
            fr.has_lhook = std::stoi(cols[6]) != 0;
        } catch (const std::exception&) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": bad numeric field");
        }
        fr.image_path = cols[3];
        fr.mask_path = cols[4];
        if (!cur_case || cur_case->case_id != case_id) {
            m.cases.push_back(CaseRecord{case_id, {}});
            cur_case = &m.cases.back();
            cur_clip = nullptr;
        }
        if (!cur_clip || cur_clip->clip_id != clip_id) {
            cur_case->clips.push_back(ClipRecord{clip_id, {}});
            cur_clip = &cur_case->clips.back();
        }
        cur_clip->frames.push_back(std::move(fr));
    }
    if (m.cases.empty()) throw ValidationError("manifest has no frame records: " + path);
    validate_manifest(m);
    return m;
}

CaseSplit CaseSplit::surgical_default() {
    CaseSplit s;
    s.train = {1, 12, 17, 25, 27, 28, 35, 43, 48};
    s.validation = {18, 20, 24, 37};
    s.test = {9, 26, 52, 55};
    return s;
}

void validate_split(const DatasetManifest& m, const CaseSplit& s) {
    if (s.train.empty() || s.validation.empty() || s.test.empty())
        throw ValidationError("case split needs non-empty train, validation, and test lists");
    std::map<int, const char*> owner;
    auto claim = [&](const std::vector<int>& ids, const char* name) {
        for (int id : ids) {
            auto [it, inserted] = owner.emplace(id, name);
            if (!inserted)
                throw ValidationError("case " + std::to_string(id) + " assigned to both " +
                                      it->second + " and " + name);
        }
    };
    claim(s.train, "train");
    claim(s.validation, "validation");
    claim(s.test, "test");

    std::set<int> manifest_cases;
    for (const auto& c : m.cases) manifest_cases.insert(c.case_id);
    for (const auto& [id, name] : owner)
        if (!manifest_cases.count(id))
            throw ValidationError("split names unknown case " + std::to_string(id));
    for (int id : manifest_cases)
        if (!owner.count(id))
            throw ValidationError("case " + std::to_string(id) + " missing from the split");
}

SplitManifests split_by_cases(const DatasetManifest& m, const CaseSplit& s) {
    validate_split(m, s);
    auto contains = [](const std::vector<int>& ids, int id) {
        return std::find(ids.begin(), ids.end(), id) != ids.end();
    };
    SplitManifests out;
    out.train.root = out.validation.root = out.test.root = m.root;
    for (const auto& c : m.cases) {
        if (contains(s.train, c.case_id)) out.train.cases.push_back(c);
        else if (contains(s.validation, c.case_id)) out.validation.cases.push_back(c);
        else out.test.cases.push_back(c);
    }
    return out;
}

double ClassBalance::grasper_pct() const {
    return frames == 0 ? 0.0 : 100.0 * static_cast<double>(grasper_frames) / frames;
}

double ClassBalance::lhook_pct() const {
    return frames == 0 ? 0.0 : 100.0 * static_cast<double>(lhook_frames) / frames;
}

ClassBalance class_balance_stats(const DatasetManifest& m) {
    if (m.empty()) throw ValidationError("class balance of an empty manifest");
    ClassBalance b;
    for (const auto& c : m.cases)
        for (const auto& clip : c.clips)
            for (const auto& fr : clip.frames) {
                ++b.frames;
                if (fr.has_grasper) ++b.grasper_frames;
                if (fr.has_lhook) ++b.lhook_frames;
            }
    return b;
}

} // namespace flowseg
