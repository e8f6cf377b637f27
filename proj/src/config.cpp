#include "coda/config.hpp"

#include <fstream>
#include <sstream>

#include "coda/errors.hpp"

namespace coda {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ';')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        return std::stoull(value);
    } catch (...) {
        throw ConfigError("invalid integer for " + key + ": " + value);
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        return std::stod(value);
    } catch (...) {
        throw ConfigError("invalid number for " + key + ": " + value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("invalid boolean for " + key + ": " + value);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        cfg.raw[full] = value;

        if (full == "input.table") cfg.table_path = value;
        else if (full == "input.history") cfg.history_path = value;
        else if (full == "input.target_year") cfg.target_year = static_cast<int>(parse_u64(full, value));
        else if (full == "preprocess.exclude_rows") cfg.exclude_rows = split_list(value);
        else if (full == "preprocess.exclude_columns") cfg.exclude_columns = split_list(value);
        else if (full.rfind("preprocess.aggregate.", 0) == 0) {
            cfg.aggregate.push_back({full.substr(std::string("preprocess.aggregate.").size()),
                                     split_list(value)});
        } else if (full == "params.kmeans_k") cfg.kmeans_k = parse_u64(full, value);
        else if (full == "params.qmode_k") cfg.qmode_k = parse_u64(full, value);
        else if (full == "params.kmeans_restarts") cfg.kmeans_restarts = parse_u64(full, value);
        else if (full == "params.repetitions") cfg.repetitions = parse_u64(full, value);
        else if (full == "params.seed") cfg.seed = parse_u64(full, value);
        else if (full == "params.diagnostics_k_min") cfg.diagnostics_k_min = parse_u64(full, value);
        else if (full == "params.diagnostics_k_max") cfg.diagnostics_k_max = parse_u64(full, value);
        else if (full == "tsne.enabled") cfg.tsne_enabled = parse_bool(full, value);
        else if (full == "tsne.perplexity") cfg.tsne_perplexity = parse_double(full, value);
        else if (full == "tsne.learning_rate") cfg.tsne_learning_rate = parse_double(full, value);
        else if (full == "tsne.iterations") cfg.tsne_iterations = parse_u64(full, value);
        else if (full == "tsne.early_exaggeration") cfg.tsne_early_exaggeration = parse_double(full, value);
        else if (full == "tsne.exaggeration_iters") cfg.tsne_exaggeration_iters = parse_u64(full, value);
        else if (full == "output.dir") cfg.out_dir = value;
        else throw ConfigError("unknown configuration key: " + full);
    }
    if (cfg.table_path.empty()) throw ConfigError("input.table is required");
    if (cfg.kmeans_k < 2) throw ConfigError("params.kmeans_k must be >= 2");
    if (cfg.qmode_k < 2) throw ConfigError("params.qmode_k must be >= 2");
    if (cfg.repetitions < 1) throw ConfigError("params.repetitions must be >= 1");
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_hash(const PipelineConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : config.raw) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace coda
