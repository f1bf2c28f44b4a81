#include "fedsnn/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "fedsnn/errors.hpp"

namespace fedsnn {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::map<std::string, std::string> read_pairs(std::istream& in) {
    std::map<std::string, std::string> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key or value");
        }
        if (!pairs.emplace(key, value).second) {
            throw ConfigError("config: duplicate key '" + key + "'");
        }
    }
    return pairs;
}

class PairReader {
public:
    explicit PairReader(std::map<std::string, std::string> pairs)
        : pairs_(std::move(pairs)) {}

    bool has(const std::string& key) const { return pairs_.count(key) != 0; }

    std::string take(const std::string& key) {
        auto it = pairs_.find(key);
        const std::string value = it->second;
        pairs_.erase(it);
        return value;
    }

    template <typename T>
    void number(const std::string& key, T& out) {
        if (!has(key)) {
            return;
        }
        const std::string value = take(key);
        T parsed{};
        const auto* begin = value.data();
        const auto* end = begin + value.size();
        auto result = std::from_chars(begin, end, parsed);
        if (result.ec != std::errc() || result.ptr != end) {
            throw ConfigError("config: cannot parse value '" + value + "' for key '" +
                              key + "'");
        }
        out = parsed;
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) {
            return;
        }
        const std::string value = take(key);
        if (value == "true" || value == "1") {
            out = true;
        } else if (value == "false" || value == "0") {
            out = false;
        } else {
            throw ConfigError("config: expected true/false for key '" + key + "'");
        }
    }

    void finish() const {
        if (!pairs_.empty()) {
            throw ConfigError("config: unknown key '" + pairs_.begin()->first + "'");
        }
    }

private:
    std::map<std::string, std::string> pairs_;
};

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) {
            items.push_back(t);
        }
    }
    return items;
}

} // namespace

std::size_t RunConfig::effective_rounds() const {
    if (rounds != 0) {
        return rounds;
    }
    return total_steps() / delta_s;
}

std::size_t RunConfig::effective_eval_every() const {
    if (eval_every != 0) {
        return eval_every;
    }
    const std::size_t t = effective_rounds();
    return t < 50 ? 1 : t / 50;
}

void RunConfig::validate() const {
    if (n_input == 0 || n_output == 0) {
        throw ConfigError("config: n_input and n_output must be positive");
    }
    if (k_basis == 0 || basis_window < k_basis) {
        throw ConfigError("config: need 1 <= k_basis <= basis_window");
    }
    if (alpha <= 0.0) {
        throw ConfigError("config: alpha must be > 0");
    }
    if (kappa < 0.0 || kappa >= 1.0) {
        throw ConfigError("config: kappa must be in [0, 1)");
    }
    if (delta_s == 0) {
        throw ConfigError("config: delta_s must be >= 1");
    }
    if (devices == 0) {
        throw ConfigError("config: devices must be >= 1");
    }
    if (tau == 0) {
        throw ConfigError("config: tau must be >= 1");
    }
    if (d_examples == 0 || s_prime == 0) {
        throw ConfigError("config: d_examples and s_prime must be positive");
    }
    if (total_steps() % delta_s != 0) {
        throw ConfigError("config: D*(S'+gap) = " + std::to_string(total_steps()) +
                          " is not divisible by delta_s = " + std::to_string(delta_s));
    }
    if (rounds != 0 && rounds * delta_s != total_steps()) {
        throw ConfigError("config: rounds * delta_s = " + std::to_string(rounds * delta_s) +
                          " != D*(S'+gap) = " + std::to_string(total_steps()));
    }
    if (sparse_rate) {
        if (*sparse_rate <= 0.0) {
            throw ConfigError("config: sparse_rate must be > 0");
        }
        if (*sparse_rate * static_cast<double>(tau) < 0.5) {
            throw ConfigError("config: sparse_rate * tau rounds below one weight per sync");
        }
    }
    if (target == TargetScheme::periodic && target_period == 0) {
        throw ConfigError("config: target_period must be >= 1");
    }
    if (data == DataSource::synthetic) {
        if (devices != n_output) {
            throw ConfigError("config: synthetic data requires devices == n_output "
                              "(one class per device)");
        }
        if (n_input < devices) {
            throw ConfigError("config: synthetic data needs n_input >= devices");
        }
        if (noise < 0.0 || noise > 1.0) {
            throw ConfigError("config: noise must be in [0, 1]");
        }
        if (train_per_device == 0 || test_per_class == 0) {
            throw ConfigError("config: train_per_device and test_per_class must be >= 1");
        }
    } else {
        if (raster_train.size() != devices) {
            throw ConfigError("config: raster_train must list one file per device");
        }
        if (raster_test.empty()) {
            throw ConfigError("config: raster_test is required for raster data");
        }
        if (p_max < 0.0 || p_max > 1.0) {
            throw ConfigError("config: p_max must be in [0, 1]");
        }
    }
    if (eval_samples == 0) {
        throw ConfigError("config: eval_samples must be >= 1");
    }
}

RunConfig parse_config_text(const std::string& text) {
    std::istringstream stream(text);
    PairReader reader(read_pairs(stream));
    RunConfig cfg;

    if (!reader.has("seed")) {
        throw ConfigError("config: missing required key 'seed'");
    }
    reader.number("seed", cfg.seed);

    if (!reader.has("data")) {
        throw ConfigError("config: missing required key 'data'");
    }
    {
        const std::string value = reader.take("data");
        if (value == "synthetic") {
            cfg.data = DataSource::synthetic;
        } else if (value == "raster") {
            cfg.data = DataSource::raster;
        } else {
            throw ConfigError("config: data must be 'synthetic' or 'raster'");
        }
    }

    reader.number("n_input", cfg.n_input);
    reader.number("n_hidden", cfg.n_hidden);
    reader.number("n_output", cfg.n_output);
    reader.number("k_basis", cfg.k_basis);
    reader.number("basis_window", cfg.basis_window);
    reader.number("alpha", cfg.alpha);
    reader.number("kappa", cfg.kappa);
    reader.number("delta_s", cfg.delta_s);
    reader.number("devices", cfg.devices);
    reader.number("tau", cfg.tau);
    reader.number("rounds", cfg.rounds);
    if (reader.has("sparse_rate")) {
        double rate = 0.0;
        reader.number("sparse_rate", rate);
        cfg.sparse_rate = rate;
    }
    reader.number("d_examples", cfg.d_examples);
    reader.number("s_prime", cfg.s_prime);
    reader.number("gap", cfg.gap);
    if (reader.has("target")) {
        const std::string value = reader.take("target");
        if (value == "constant") {
            cfg.target = TargetScheme::constant_one;
        } else if (value == "periodic") {
            cfg.target = TargetScheme::periodic;
        } else {
            throw ConfigError("config: target must be 'constant' or 'periodic'");
        }
    }
    reader.number("target_period", cfg.target_period);
    reader.number("noise", cfg.noise);
    reader.number("template_high", cfg.template_high);
    reader.number("template_low", cfg.template_low);
    reader.number("train_per_device", cfg.train_per_device);
    reader.number("test_per_class", cfg.test_per_class);
    if (reader.has("raster_train")) {
        cfg.raster_train = split_list(reader.take("raster_train"));
    }
    if (reader.has("raster_test")) {
        cfg.raster_test = reader.take("raster_test");
    }
    reader.number("p_max", cfg.p_max);
    reader.number("eval_samples", cfg.eval_samples);
    reader.number("eval_every", cfg.eval_every);
    reader.boolean("with_baseline", cfg.with_baseline);
    if (reader.has("out")) {
        cfg.out = reader.take("out");
    }

    reader.finish();
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

} // namespace fedsnn
