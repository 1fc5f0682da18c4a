#include "mixnl/config.hpp"

#include "mixnl/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <regex>
#include <sstream>

namespace mixnl {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class Entries {
public:
    void add(const std::string& key, const std::string& value, int line) {
        if (map_.count(key)) {
            throw ParseError(key, line, "duplicate key (first set on line " + std::to_string(map_[key].line) + ")");
        }
        map_[key] = {value, line, false};
    }

    bool has(const std::string& key) const { return map_.count(key) != 0; }

    Entry* find(const std::string& key) {
        auto it = map_.find(key);
        if (it == map_.end()) {
            return nullptr;
        }
        it->second.used = true;
        return &it->second;
    }

    template <class T, class Parse>
    void read(const std::string& key, T& target, Parse parse) {
        if (Entry* e = find(key)) {
            try {
                target = parse(e->value);
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception& err) {
                throw ParseError(key, e->line, err.what());
            }
        }
    }

    int line_of(const std::string& key) const {
        auto it = map_.find(key);
        return it == map_.end() ? 0 : it->second.line;
    }

    // Indices i present for keys "<prefix>[i].<field>".
    std::map<int, std::map<std::string, std::string>> indexed(const std::string& prefix) {
        static const std::regex pattern(R"(^([a-z_.]+)\[(\d+)\]\.([a-z_]+)$)");
        std::map<int, std::map<std::string, std::string>> out;
        for (auto& [key, entry] : map_) {
            std::smatch m;
            if (std::regex_match(key, m, pattern) && m[1] == prefix) {
                out[std::stoi(m[2])][m[3]] = key;
                entry.used = true;
            }
        }
        return out;
    }

    void reject_unused() const {
        for (const auto& [key, entry] : map_) {
            if (!entry.used && key.rfind("manifest.", 0) != 0) {
                throw ParseError(key, entry.line, "unknown key");
            }
        }
    }

    const std::string& value(const std::string& key) const { return map_.at(key).value; }

private:
    std::map<std::string, Entry> map_;
};

double parse_double(const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ConfigError("expected a number, got '" + text + "'");
    }
    if (!std::isfinite(v)) {
        throw ConfigError("value must be finite");
    }
    return v;
}

long long parse_integer(const std::string& text) {
    long long v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ConfigError("expected an integer, got '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& text) {
    const long long v = parse_integer(text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError("integer out of range");
    }
    return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ConfigError("expected a nonnegative integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("expected true or false, got '" + text + "'");
}

double positive(double v) {
    if (!(v > 0.0)) {
        throw ConfigError("value must be positive");
    }
    return v;
}

int positive_int(const std::string& text) {
    const int v = parse_int(text);
    if (v < 1) {
        throw ConfigError("value must be at least 1");
    }
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunConfig parse_config(std::istream& in) {
    Entries entries;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError(text, line, "expected 'key = value'");
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("", line, "missing key");
        }
        if (value.empty()) {
            throw ParseError(key, line, "missing value");
        }
        entries.add(key, value, line);
    }

    RunConfig cfg;
    DomainConfig& d = cfg.domain;
    entries.read("omega.a", d.omega.a, parse_double);
    entries.read("omega.b", d.omega.b, parse_double);
    entries.read("truncation_radius", d.truncation_radius, parse_double);
    entries.read("s", d.fractional_order, parse_double);
    entries.read("pure_neumann", d.pure_neumann, parse_bool);
    entries.read("far_field_neumann", d.far_field_neumann, parse_bool);
    entries.read("mesh.h", cfg.mesh_h, [](const std::string& t) { return positive(parse_double(t)); });
    entries.read("nonlocal_weight", cfg.nonlocal_weight, [](const std::string& t) {
        const double w = parse_double(t);
        if (w < 0.0) {
            throw ConfigError("nonlocal_weight must be nonnegative");
        }
        return w;
    });
    entries.read("eig.count", cfg.eig_count, positive_int);
    entries.read("eig.tol", cfg.eig_tol, [](const std::string& t) { return positive(parse_double(t)); });
    entries.read("seed", cfg.seed, parse_seed);

    const auto neumann = entries.indexed("neumann");
    int expected = 0;
    for (const auto& [index, fields] : neumann) {
        const std::string& any_key = fields.begin()->second;
        if (index != expected++) {
            throw ParseError(any_key, entries.line_of(any_key), "neumann indices must be consecutive from 0");
        }
        Interval iv;
        for (const auto& [field, key] : fields) {
            if (field != "a" && field != "b") {
                throw ParseError(key, entries.line_of(key), "unknown key");
            }
            try {
                (field == "a" ? iv.a : iv.b) = parse_double(entries.value(key));
            } catch (const ConfigError& err) {
                throw ParseError(key, entries.line_of(key), err.what());
            }
        }
        if (fields.size() != 2) {
            throw ParseError(any_key, entries.line_of(any_key), "neumann interval needs both .a and .b");
        }
        d.neumann_set.push_back(iv);
    }
    if (d.pure_neumann && d.neumann_set.empty()) {
        d.neumann_set = {{-d.truncation_radius, d.omega.a}, {d.omega.b, d.truncation_radius}};
    }

    if (entries.has("schedule.mode")) {
        Entry* mode_entry = entries.find("schedule.mode");
        ScheduleMode mode{};
        try {
            mode = parse_schedule_mode(mode_entry->value);
        } catch (const ConfigError& err) {
            throw ParseError("schedule.mode", mode_entry->line, err.what());
        }
        double separation = 1.0;
        entries.read("schedule.separation", separation, [](const std::string& t) { return parse_double(t); });
        DissipationSchedule sched;
        switch (mode) {
        case ScheduleMode::NeumannShrink: sched = neumann_shrink_schedule(d.fractional_order); break;
        case ScheduleMode::DirichletShrinkApproaching:
            sched = dirichlet_approaching_schedule(d.fractional_order);
            break;
        case ScheduleMode::DirichletShrinkSeparated:
            sched = dirichlet_separated_schedule(d.fractional_order, separation);
            break;
        }
        sched.separation = mode == ScheduleMode::DirichletShrinkSeparated ? separation : 0.0;
        sched.omega = d.omega;
        sched.truncation_radius = d.truncation_radius;
        entries.read("schedule.k_max", sched.k_max, positive_int);

        const auto sets = entries.indexed("schedule.set");
        if (!sets.empty()) {
            sched.sets.clear();
        }
        expected = 0;
        for (const auto& [index, fields] : sets) {
            const std::string& any_key = fields.begin()->second;
            if (index != expected++) {
                throw ParseError(any_key, entries.line_of(any_key), "schedule.set indices must be consecutive from 0");
            }
            IntervalFormula f;
            for (const auto& [field, key] : fields) {
                if (field != "lo" && field != "hi") {
                    throw ParseError(key, entries.line_of(key), "unknown key");
                }
                try {
                    (field == "lo" ? f.lo : f.hi) = EndpointFormula::parse(entries.value(key));
                } catch (const ConfigError& err) {
                    throw ParseError(key, entries.line_of(key), err.what());
                }
            }
            if (fields.size() != 2) {
                throw ParseError(any_key, entries.line_of(any_key), "schedule set needs both .lo and .hi");
            }
            sched.sets.push_back(f);
        }
        cfg.schedule = sched;
    } else {
        for (const char* key : {"schedule.k_max", "schedule.separation"}) {
            if (entries.has(key)) {
                throw ParseError(key, entries.line_of(key), "schedule keys need schedule.mode");
            }
        }
    }

    if (entries.has("bifurcation.nonlinearity")) {
        Entry* e = entries.find("bifurcation.nonlinearity");
        NonlinearityKind kind{};
        try {
            kind = parse_nonlinearity_kind(e->value);
        } catch (const ConfigError& err) {
            throw ParseError("bifurcation.nonlinearity", e->line, err.what());
        }
        int p = 3;
        double scale = 1.0;
        entries.read("bifurcation.p", p, parse_int);
        entries.read("bifurcation.scale", scale, parse_double);
        try {
            cfg.nonlinearity = kind == NonlinearityKind::Logistic ? Nonlinearity::logistic(p, scale)
                                                                  : Nonlinearity::asym_linear_demo(scale);
        } catch (const ConfigError& err) {
            throw ParseError("bifurcation.nonlinearity", e->line, err.what());
        }
        auto& c = cfg.continuation;
        auto pos = [](const std::string& t) { return positive(parse_double(t)); };
        entries.read("bifurcation.epsilon", c.epsilon, pos);
        entries.read("bifurcation.norm_cap_factor", c.norm_cap_factor, pos);
        entries.read("bifurcation.lambda_cap_factor", c.lambda_cap_factor, pos);
        entries.read("bifurcation.max_step", c.max_step, pos);
        entries.read("bifurcation.max_points", c.max_points, positive_int);
        entries.read("bifurcation.inverted", cfg.write_inverted, parse_bool);
    }

    entries.read("verify.picone_trials", cfg.picone_trials, positive_int);
    entries.read("verify.picone_seed", cfg.picone_seed, parse_seed);
    entries.read("verify.wmp_trials", cfg.wmp_trials, positive_int);
    entries.read("verify.wmp_seed", cfg.wmp_seed, parse_seed);

    entries.reject_unused();
    validate_config(cfg.domain);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    return parse_config(in);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    const DomainConfig& d = cfg.domain;
    auto put = [&](const std::string& key, const std::string& value) { os << key << " = " << value << '\n'; };
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    put("omega.a", format_double(d.omega.a));
    put("omega.b", format_double(d.omega.b));
    if (!d.pure_neumann) {
        for (std::size_t i = 0; i < d.neumann_set.size(); ++i) {
            put("neumann[" + std::to_string(i) + "].a", format_double(d.neumann_set[i].a));
            put("neumann[" + std::to_string(i) + "].b", format_double(d.neumann_set[i].b));
        }
    }
    put("truncation_radius", format_double(d.truncation_radius));
    put("s", format_double(d.fractional_order));
    put("pure_neumann", flag(d.pure_neumann));
    put("far_field_neumann", flag(d.far_field_neumann));
    put("mesh.h", format_double(cfg.mesh_h));
    put("nonlocal_weight", format_double(cfg.nonlocal_weight));
    put("eig.count", std::to_string(cfg.eig_count));
    put("eig.tol", format_double(cfg.eig_tol));
    put("seed", std::to_string(cfg.seed));
    if (cfg.schedule) {
        const auto& s = *cfg.schedule;
        put("schedule.mode", std::string(to_string(s.mode)));
        put("schedule.k_max", std::to_string(s.k_max));
        if (s.mode == ScheduleMode::DirichletShrinkSeparated) {
            put("schedule.separation", format_double(s.separation));
        }
        for (std::size_t i = 0; i < s.sets.size(); ++i) {
            put("schedule.set[" + std::to_string(i) + "].lo", s.sets[i].lo.str());
            put("schedule.set[" + std::to_string(i) + "].hi", s.sets[i].hi.str());
        }
    }
    if (cfg.nonlinearity) {
        const auto& nl = *cfg.nonlinearity;
        const auto& c = cfg.continuation;
        put("bifurcation.nonlinearity", std::string(to_string(nl.kind)));
        put("bifurcation.p", std::to_string(nl.p));
        put("bifurcation.scale", format_double(nl.scale));
        put("bifurcation.epsilon", format_double(c.epsilon));
        put("bifurcation.norm_cap_factor", format_double(c.norm_cap_factor));
        put("bifurcation.lambda_cap_factor", format_double(c.lambda_cap_factor));
        if (std::isfinite(c.max_step)) {
            put("bifurcation.max_step", format_double(c.max_step));
        }
        put("bifurcation.max_points", std::to_string(c.max_points));
        put("bifurcation.inverted", flag(cfg.write_inverted));
    }
    put("verify.picone_trials", std::to_string(cfg.picone_trials));
    put("verify.picone_seed", std::to_string(cfg.picone_seed));
    put("verify.wmp_trials", std::to_string(cfg.wmp_trials));
    put("verify.wmp_seed", std::to_string(cfg.wmp_seed));
    return os.str();
}

} // namespace mixnl
