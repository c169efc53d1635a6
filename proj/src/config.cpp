#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "magneu/pipeline.hpp"

namespace magneu {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double parse_number(const std::string& tok, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + tok + "' for key '" + key + "'");
    }
}

DomainSpec parse_domain(const std::vector<std::string>& toks) {
    if (toks.empty()) throw ConfigError("empty domain value");
    const std::string& kind = toks[0];
    if (kind == "disk") {
        if (toks.size() != 2) throw ConfigError("domain disk expects one radius");
        return DomainSpec::disk(parse_number(toks[1], "domain"));
    }
    if (kind == "ellipse") {
        if (toks.size() != 3) throw ConfigError("domain ellipse expects two semi-axes");
        return DomainSpec::ellipse(parse_number(toks[1], "domain"),
                                   parse_number(toks[2], "domain"));
    }
    if (kind == "star") {
        if (toks.size() < 2) throw ConfigError("domain star expects r0");
        const double r0 = parse_number(toks[1], "domain");
        std::vector<double> cos_coef, sin_coef;
        for (std::size_t i = 2; i < toks.size(); ++i) {
            const std::string& t = toks[i];
            const auto eq = t.find('=');
            if (t.size() < 4 || (t[0] != 'c' && t[0] != 's') || eq == std::string::npos)
                throw ConfigError("bad star coefficient '" + t + "' (use cK=... or sK=...)");
            const int k = static_cast<int>(parse_number(t.substr(1, eq - 1), "domain"));
            if (k < 1 || k > 8) throw ConfigError("star mode index out of range in '" + t + "'");
            auto& coef = (t[0] == 'c') ? cos_coef : sin_coef;
            if (static_cast<std::size_t>(k) > coef.size()) coef.resize(k, 0.0);
            coef[k - 1] = parse_number(t.substr(eq + 1), "domain");
        }
        return DomainSpec::fourier_star(r0, std::move(cos_coef), std::move(sin_coef));
    }
    throw ConfigError("unknown domain kind '" + kind + "'");
}

void parse_into(std::istream& in, const std::string& base_dir, ExperimentConfig& cfg,
                int depth) {
    if (depth > 8) throw ConfigError("include depth exceeded");
    std::string line;
    bool betas_set = false, hs_set = false;
    std::vector<double> betas, hs;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.rfind("include ", 0) == 0) {
            const std::string rel = trim(line.substr(8));
            const std::filesystem::path p = std::filesystem::path(base_dir) / rel;
            std::ifstream sub(p);
            if (!sub) throw ConfigError("cannot open include '" + p.string() + "'");
            parse_into(sub, p.parent_path().string(), cfg, depth + 1);
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::vector<std::string> toks = split_tokens(trim(line.substr(eq + 1)));
        if (toks.empty()) throw ConfigError("empty value for key '" + key + "'");

        if (key == "domain") {
            cfg.domains.push_back(parse_domain(toks));
        } else if (key == "beta") {
            for (const auto& t : toks) betas.push_back(parse_number(t, key));
            betas_set = true;
        } else if (key == "h") {
            for (const auto& t : toks) hs.push_back(parse_number(t, key));
            hs_set = true;
        } else if (key == "n_levels") {
            cfg.n_levels = static_cast<int>(parse_number(toks[0], key));
        } else if (key == "n_grid") {
            cfg.n_grid = static_cast<int>(parse_number(toks[0], key));
        } else if (key == "beta_star_grid") {
            cfg.beta_star_grid = static_cast<int>(parse_number(toks[0], key));
        } else if (key == "beta_star_tol") {
            cfg.beta_star_tol = parse_number(toks[0], key);
        } else if (key == "n_max") {
            cfg.n_max = static_cast<int>(parse_number(toks[0], key));
        } else if (key == "out") {
            cfg.out_dir = toks[0];
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (betas_set) cfg.betas = std::move(betas);
    if (hs_set) cfg.hs = std::move(hs);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
    ExperimentConfig cfg;
    parse_into(in, base_dir, cfg, 0);
    if (cfg.n_levels < 2) throw ConfigError("n_levels must be at least 2");
    if (cfg.n_grid < 8) throw ConfigError("n_grid must be at least 8");
    for (double b : cfg.betas)
        if (b < 0.0) throw ConfigError("beta must be nonnegative");
    for (double h : cfg.hs)
        if (!(h > 0.0)) throw ConfigError("h must be positive");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, std::filesystem::path(path).parent_path().string());
}

}  // namespace magneu
