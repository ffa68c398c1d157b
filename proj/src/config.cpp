#include "latticeecho/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "latticeecho/error.hpp"

namespace latticeecho {

namespace pt = boost::property_tree;

namespace {

// Recursive descent over + - * / ( ) with numbers and named symbols.
class ExpressionParser {
public:
    ExpressionParser(const std::string& text, const std::map<std::string, double>& symbols)
        : text_(text), symbols_(symbols) {}

    double parse() {
        const double value = sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return value;
    }

private:
    double sum() {
        double value = product();
        for (;;) {
            if (accept('+')) value += product();
            else if (accept('-')) value -= product();
            else return value;
        }
    }

    double product() {
        double value = unary();
        for (;;) {
            if (accept('*')) value *= unary();
            else if (accept('/')) value /= unary();
            else return value;
        }
    }

    double unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return primary();
    }

    double primary() {
        skip_space();
        if (accept('(')) {
            const double value = sum();
            if (!accept(')')) fail("missing ')'");
            return value;
        }
        if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            std::size_t used = 0;
            const double value = std::stod(text_.substr(pos_), &used);
            pos_ += used;
            return value;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name.empty()) fail("expected a number or symbol");
        if (name == "pi") return std::numbers::pi;
        const auto it = symbols_.find(name);
        if (it == symbols_.end()) fail("unknown symbol '" + name + "'");
        return it->second;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("cannot evaluate '" + text_ + "': " + why);
    }

    const std::string& text_;
    const std::map<std::string, double>& symbols_;
    std::size_t pos_ = 0;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) items.push_back(item.substr(b, e - b + 1));
    }
    return items;
}

class Section {
public:
    Section(const pt::ptree* tree, std::string name, std::map<std::string, double>& symbols)
        : tree_(tree), name_(std::move(name)), symbols_(symbols) {}

    bool present() const { return tree_ != nullptr; }

    std::optional<std::string> text(const std::string& key) const {
        if (!tree_) return std::nullopt;
        const auto v = tree_->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return *v;
    }

    std::string text_or(const std::string& key, const std::string& fallback) const {
        return text(key).value_or(fallback);
    }

    std::optional<double> number(const std::string& key) const {
        const auto t = text(key);
        if (!t) return std::nullopt;
        try {
            return evaluate_expression(*t, symbols_);
        } catch (const ConfigError& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    double number_or(const std::string& key, double fallback) const {
        return number(key).value_or(fallback);
    }

    double required(const std::string& key) const {
        const auto v = number(key);
        if (!v) throw ConfigError(where(key) + " is required");
        return *v;
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        const auto t = text(key);
        if (!t) return out;
        for (const auto& item : split_list(*t)) {
            try {
                out.push_back(evaluate_expression(item, symbols_));
            } catch (const ConfigError& e) {
                throw ConfigError(where(key) + ": " + e.what());
            }
        }
        return out;
    }

    int integer_or(const std::string& key, int fallback) const {
        const auto v = number(key);
        if (!v) return fallback;
        if (*v != std::round(*v)) throw ConfigError(where(key) + " must be an integer");
        return static_cast<int>(*v);
    }

    bool flag_or(const std::string& key, bool fallback) const {
        const auto t = text(key);
        if (!t) return fallback;
        if (*t == "true" || *t == "1" || *t == "yes") return true;
        if (*t == "false" || *t == "0" || *t == "no") return false;
        throw ConfigError(where(key) + " must be true or false");
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::map<std::string, double>& symbols_;
};

LatticeSpec parse_lattice(const Section& s) {
    if (!s.present()) throw ConfigError("missing [lattice] section");
    LatticeSpec spec;
    spec.dimension = s.integer_or("dimension", 1);
    const auto extents = s.numbers("extents");
    if (static_cast<int>(extents.size()) != spec.dimension)
        throw ConfigError("[lattice] extents must list one value per dimension");
    spec.extents = {static_cast<int>(extents[0]), spec.dimension == 2 ? static_cast<int>(extents[1]) : 1};
    spec.spacing = s.number_or("spacing", 1.0);
    spec.base_energy = s.number_or("E0", 0.0);
    const std::string boundary = s.text_or("boundary", "periodic");
    if (boundary == "periodic") spec.boundary = Boundary::periodic;
    else if (boundary == "open") spec.boundary = Boundary::open;
    else throw ConfigError("[lattice] boundary must be periodic or open");

    const double J = s.number_or("J", 1.0);
    spec.hoppings.clear();
    if (spec.dimension == 2 && (s.text("Jx") || s.text("Jy"))) {
        spec.hoppings.push_back({1, 0, s.number_or("Jx", J)});
        spec.hoppings.push_back({1, 1, s.number_or("Jy", J)});
    } else {
        spec.hoppings.push_back({1, -1, J});
    }
    for (int r = 2; r <= 9; ++r) {
        const double v = s.number_or("J" + std::to_string(r), 0.0);
        if (v != 0.0) spec.hoppings.push_back({r, -1, v});
    }
    try {
        spec.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("[lattice] ") + e.what());
    }
    return spec;
}

Momentum momentum_or_zero(const Section& s, const std::string& key, int dimension) {
    const auto v = s.numbers(key);
    Momentum k{0.0, 0.0};
    if (v.empty()) return k;
    if (static_cast<int>(v.size()) != dimension)
        throw ConfigError(s.where(key) + " needs one component per dimension");
    std::copy(v.begin(), v.end(), k.begin());
    return k;
}

InitialStateSpec parse_initial(const Section& s, const LatticeSpec& lattice,
                               const std::filesystem::path& base_dir, std::uint64_t seed) {
    if (!s.present()) throw ConfigError("missing [initial] section");
    const std::string kind = s.text_or("kind", "");
    if (kind == "single_site") {
        const auto site = s.numbers("site");
        Coord n{0, 0};
        for (std::size_t a = 0; a < site.size() && a < 2; ++a) n[a] = static_cast<int>(site[a]);
        return SingleSite{n};
    }
    if (kind == "gaussian") {
        Gaussian g;
        const auto centre = s.numbers("center");
        for (std::size_t a = 0; a < centre.size() && a < 2; ++a) g.center[a] = centre[a];
        g.sigma = s.required("sigma");
        if (!(g.sigma > 0.0)) throw ConfigError(s.where("sigma") + " must be positive");
        g.k0 = momentum_or_zero(s, "k0", lattice.dimension);
        g.unfolded = s.flag_or("unfolded", false);
        return g;
    }
    if (kind == "bitmap") {
        Bitmap b;
        const auto path = s.text("path");
        if (!path) throw ConfigError("[initial] path is required for bitmap states");
        b.path = std::filesystem::path(*path).is_absolute() ? std::filesystem::path(*path)
                                                             : base_dir / *path;
        if (!std::filesystem::exists(b.path))
            throw ConfigError("[initial] bitmap " + b.path.string() + " does not exist");
        if (s.text("k0")) b.k0 = momentum_or_zero(s, "k0", lattice.dimension);
        b.unfolded = s.flag_or("unfolded", false);
        return b;
    }
    if (kind == "random") return RandomState{seed};
    throw ConfigError("[initial] kind must be single_site, gaussian, bitmap or random");
}

}  // namespace

double evaluate_expression(const std::string& text, const std::map<std::string, double>& symbols) {
    return ExpressionParser(text, symbols).parse();
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "M") return SweepAxis::M;
    if (name == "delta_T" || name == "dT") return SweepAxis::delta_T;
    if (name == "J2") return SweepAxis::J2;
    if (name == "J3") return SweepAxis::J3;
    throw ConfigError("sweep axis must be M, delta_T, J2 or J3");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::M: return "M";
        case SweepAxis::delta_T: return "delta_T";
        case SweepAxis::J2: return "J2";
        case SweepAxis::J3: return "J3";
    }
    return "?";
}

PropagatorKind parse_propagator(const std::string& name) {
    if (name == "kspace") return PropagatorKind::kspace;
    if (name == "realspace") return PropagatorKind::realspace;
    throw ConfigError("propagator must be kspace or realspace");
}

PulseSchedule ExperimentConfig::pulse_schedule() const {
    PulseSchedule out;
    if (schedule) out.events.push_back({schedule->T0, schedule->delta_T, schedule->M, schedule->sign, schedule->kind});
    return out;
}

double ExperimentConfig::pulse_end() const {
    if (!schedule) return 0.0;
    return pulse_schedule().events.front().t_end();
}

void ExperimentConfig::set_pulse_strength(double M) {
    if (!schedule) throw ConfigError("no [schedule] section");
    schedule->M = M;
    if (schedule->pi_pulse) schedule->delta_T = std::numbers::pi / (2.0 * M);
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
    }
    std::map<std::string, double> symbols;
    auto section = [&](const std::string& name) {
        const auto child = tree.get_child_optional(name);
        return Section(child ? &*child : nullptr, name, symbols);
    };

    ExperimentConfig cfg;
    cfg.lattice = parse_lattice(section("lattice"));

    const Section run = section("run");
    cfg.run.seed = static_cast<std::uint64_t>(run.number_or("seed", 42));

    const Section sched = section("schedule");
    if (sched.present()) {
        ScheduleConfig sc;
        sc.T0 = sched.required("T0");
        symbols["T0"] = sc.T0;
        sc.M = sched.required("M");
        symbols["M"] = sc.M;
        if (!(sc.M >= 0.0)) throw ConfigError("[schedule] M must be >= 0");
        const std::string dt = sched.text_or("delta_T", "pi");
        if (dt == "pi") {
            if (!(sc.M > 0.0)) throw ConfigError("[schedule] delta_T = pi needs M > 0");
            sc.pi_pulse = true;
            sc.delta_T = std::numbers::pi / (2.0 * sc.M);
        } else {
            sc.delta_T = sched.required("delta_T");
        }
        symbols["dT"] = sc.delta_T;
        const std::string mode = sched.text_or("mode", "exact");
        if (mode == "exact") sc.kind = PulseKind::exact;
        else if (mode == "phase_flip") sc.kind = PulseKind::phase_flip;
        else throw ConfigError("[schedule] mode must be exact or phase_flip");
        sc.sign = sched.integer_or("sign", 1);
        cfg.schedule = sc;
        try {
            cfg.pulse_schedule().validate();
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string("[schedule] ") + e.what());
        }
    }

    cfg.initial = parse_initial(section("initial"), cfg.lattice, base_dir, cfg.run.seed);

    if (!run.present()) throw ConfigError("missing [run] section");
    if (const auto t = run.number("t_end")) {
        cfg.run.t_end = *t;
    } else if (cfg.schedule) {
        cfg.run.t_end = 2.0 * cfg.schedule->T0 + (cfg.schedule->kind == PulseKind::exact ? cfg.schedule->delta_T : 0.0);
    } else {
        throw ConfigError("[run] t_end is required without a schedule");
    }
    cfg.run.sample_dt = run.required("sample_dt");
    if (!(cfg.run.t_end > 0.0)) throw ConfigError("[run] t_end must be positive");
    if (!(cfg.run.sample_dt > 0.0)) throw ConfigError("[run] sample_dt must be positive");
    if (cfg.run.sample_dt > cfg.run.t_end) throw ConfigError("[run] sample_dt exceeds t_end");
    cfg.run.snapshot_times = run.numbers("snapshot_times");
    for (double t : cfg.run.snapshot_times)
        if (t < 0.0 || t > cfg.run.t_end * (1.0 + 1e-12))
            throw ConfigError("[run] snapshot time " + std::to_string(t) + " outside [0, t_end]");
    if (cfg.schedule && cfg.pulse_end() > cfg.run.t_end * (1.0 + 1e-12))
        throw ConfigError("[schedule] pulse ends after t_end");
    cfg.run.propagator = parse_propagator(run.text_or("propagator", "kspace"));
    cfg.run.workers = run.integer_or("workers", 1);
    if (cfg.run.workers < 1) throw ConfigError("[run] workers must be >= 1");

    const Section output = section("output");
    if (const auto dir = output.text("dir"))
        cfg.output.dir = std::filesystem::path(*dir).is_absolute() ? std::filesystem::path(*dir) : base_dir / *dir;
    if (const auto formats = output.text("formats")) {
        const auto list = split_list(*formats);
        cfg.output.csv = std::find(list.begin(), list.end(), "csv") != list.end();
        cfg.output.pgm = std::find(list.begin(), list.end(), "pgm") != list.end();
    }

    const Section sweep = section("sweep");
    if (const auto axis = sweep.text("axis")) cfg.sweep.axis = parse_sweep_axis(*axis);
    cfg.sweep.values = sweep.numbers("values");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace latticeecho
