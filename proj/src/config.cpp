#include "krylreg/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace krylreg {

namespace {

constexpr Index kDeskScaleCap = 2000;

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(long line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

// Splits on commas at parenthesis depth zero, so problem tokens keep their
// argument lists intact.
std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    int depth = 0;
    for (char c : value) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(item));
            item.clear();
        } else {
            item += c;
        }
    }
    item = trim(item);
    if (!item.empty()) out.push_back(item);
    return out;
}

double parse_double(const std::string& s, long line, const char* field) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end == s.c_str() || *end != '\0')
        fail(line, std::string(field) + ": '" + s + "' is not a number");
    return v;
}

long long parse_int(const std::string& s, long line, const char* field) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end == s.c_str() || *end != '\0')
        fail(line, std::string(field) + ": '" + s + "' is not an integer");
    return v;
}

std::string canonical_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

ProblemToken parse_problem_token(const std::string& text, long line) {
    const std::size_t open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        fail(line, "problems: malformed token '" + text +
                       "' (expected name(args))");
    const std::string name = trim(text.substr(0, open));
    std::vector<std::string> args =
        split_list(text.substr(open + 1, text.size() - open - 2));

    ProblemToken tok;
    static const std::set<std::string> classics = {
        "shaw", "gravity", "baart", "phillips", "heat", "deriv2"};
    if (classics.count(name)) {
        if (args.size() != 1)
            fail(line, "problems: " + name + " takes one size argument");
        tok.classic = name;
        tok.n = parse_int(args[0], line, "problems");
        if (tok.n < 1 || tok.n > kDeskScaleCap)
            fail(line, "problems: size " + args[0] + " outside 1.." +
                           std::to_string(kDeskScaleCap));
        tok.token = name + "(" + std::to_string(tok.n) + ")";
        return tok;
    }
    if (name == "picard") {
        if (args.size() != 3 && args.size() != 4)
            fail(line,
                 "problems: picard takes (n, class, decay[, beta])");
        tok.picard = true;
        tok.n = parse_int(args[0], line, "problems");
        if (tok.n < 1 || tok.n > kDeskScaleCap)
            fail(line, "problems: size " + args[0] + " outside 1.." +
                           std::to_string(kDeskScaleCap));
        if (args[1] == "severe")
            tok.spec.kind = SpectrumSpec::Kind::Severe;
        else if (args[1] == "moderate")
            tok.spec.kind = SpectrumSpec::Kind::Moderate;
        else if (args[1] == "mild")
            tok.spec.kind = SpectrumSpec::Kind::Mild;
        else
            fail(line, "problems: unknown spectrum class '" + args[1] + "'");
        tok.spec.param = parse_double(args[2], line, "problems");
        tok.spec.beta =
            args.size() == 4 ? parse_double(args[3], line, "problems") : 1.0;
        tok.spec.n = tok.n;
        try {
            tok.spec.validate();
        } catch (const std::invalid_argument& e) {
            fail(line, std::string("problems: ") + e.what());
        }
        tok.token = "picard(" + std::to_string(tok.n) + "," + args[1] + "," +
                    canonical_number(tok.spec.param) + "," +
                    canonical_number(tok.spec.beta) + ")";
        return tok;
    }
    fail(line, "problems: unknown generator '" + name + "'");
}

}  // namespace

ProblemInstance instantiate(const ProblemToken& prob, double epsilon,
                            std::uint64_t seed) {
    GeneratedProblem gen;
    if (prob.picard) {
        PicardProblem p = gen_picard(prob.spec, prob.n, seed);
        gen.A = std::move(p.A);
        gen.x_true = std::move(p.x_true);
    } else {
        gen = gen_classic(prob.classic, prob.n);
    }
    if (epsilon > 0.0) return make_instance(prob.token, gen, epsilon, seed);
    // epsilon == 0 is the noise-free limit; add_noise rejects it, so the
    // instance is assembled with an exact right-hand side here.
    ProblemInstance inst;
    inst.name = prob.token;
    inst.A = std::move(gen.A);
    inst.x_true = std::move(gen.x_true);
    inst.b_true = inst.A * inst.x_true;
    inst.e = Vector::Zero(inst.b_true.size());
    inst.b = inst.b_true;
    inst.epsilon = epsilon;
    inst.seed = seed;
    return inst;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::istringstream is(text);
    std::string raw;
    long lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(lineno, "expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(lineno, "empty key");
        if (!seen.insert(key).second)
            fail(lineno, "duplicate key '" + key + "'");

        if (key == "problems") {
            for (const std::string& item : split_list(value))
                cfg.problems.push_back(parse_problem_token(item, lineno));
            if (cfg.problems.empty()) fail(lineno, "problems list is empty");
        } else if (key == "epsilons") {
            for (const std::string& item : split_list(value)) {
                const double eps = parse_double(item, lineno, "epsilons");
                if (eps < 0.0)
                    fail(lineno, "epsilons: negative noise level " + item);
                cfg.epsilons.push_back(eps);
            }
            if (cfg.epsilons.empty()) fail(lineno, "epsilons list is empty");
        } else if (key == "seeds") {
            for (const std::string& item : split_list(value)) {
                const long long s = parse_int(item, lineno, "seeds");
                if (s < 0) fail(lineno, "seeds: negative seed " + item);
                cfg.seeds.push_back(static_cast<std::uint64_t>(s));
            }
            if (cfg.seeds.empty()) fail(lineno, "seeds list is empty");
        } else if (key == "kmax") {
            const long long k = parse_int(value, lineno, "kmax");
            if (k < 1) fail(lineno, "kmax must be at least 1");
            cfg.kmax = static_cast<Index>(k);
        } else if (key == "methods") {
            for (const std::string& item : split_list(value)) {
                Method m;
                try {
                    m = parse_method(item);
                } catch (const std::invalid_argument& e) {
                    fail(lineno, std::string("methods: ") + e.what());
                }
                if (std::find(cfg.methods.begin(), cfg.methods.end(), m) !=
                    cfg.methods.end())
                    fail(lineno, "methods: duplicate '" + item + "'");
                cfg.methods.push_back(m);
            }
            if (cfg.methods.empty()) fail(lineno, "methods list is empty");
        } else if (key == "audits") {
            if (value == "true")
                cfg.audits = true;
            else if (value == "false")
                cfg.audits = false;
            else
                fail(lineno, "audits: expected true or false, got '" + value +
                                 "'");
        } else if (key == "output_dir") {
            if (value.empty()) fail(lineno, "output_dir is empty");
            cfg.output_dir = value;
        } else {
            fail(lineno, "unknown key '" + key + "'");
        }
    }
    for (const char* required :
         {"problems", "epsilons", "seeds", "kmax", "methods", "output_dir"})
        if (!seen.count(required))
            throw ConfigError(std::string("config: missing key '") + required +
                              "'");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace krylreg
