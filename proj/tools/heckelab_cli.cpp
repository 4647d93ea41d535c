#include <heckelab/algebra.hpp>
#include <heckelab/amplifier.hpp>
#include <heckelab/hecke_cosets.hpp>
#include <heckelab/mass_lab.hpp>
#include <heckelab/satake.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using heckelab::Cplx;
using heckelab::Rat;
using json = nlohmann::ordered_json;

std::vector<int64_t> parse_int_list(const std::string& s) {
    std::vector<int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
    return out;
}

// "1", "-0.5", "0.5+0.3i", "1i"
Cplx parse_complex(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    if (s.back() == 'i') {
        std::string body = s.substr(0, s.size() - 1);
        // split at the last +/- that is not an exponent sign or leading
        for (size_t k = body.size(); k-- > 1;) {
            char c = body[k];
            if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                double re = std::stod(body.substr(0, k));
                std::string im = body.substr(k);
                if (im == "+" || im == "-") im += "1";
                return {re, std::stod(im)};
            }
        }
        if (body.empty() || body == "+") return {0.0, 1.0};
        if (body == "-") return {0.0, -1.0};
        return {0.0, std::stod(body)};
    }
    return {std::stod(s), 0.0};
}

std::vector<Cplx> parse_complex_list(const std::string& s) {
    std::vector<Cplx> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
    return out;
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

json sqrtext_json(const heckelab::SqrtExt& v) {
    json j;
    j["rational"] = heckelab::rat_to_string(v.a);
    j["sqrt_p"] = heckelab::rat_to_string(v.b);
    return j;
}

json complex_json(const Cplx& z) {
    json j;
    j["re"] = fmt_double(z.real());
    j["im"] = fmt_double(z.imag());
    return j;
}

json cochar_json(const heckelab::Cocharacter& c) {
    json j = json::array();
    for (int64_t x : c.coords()) j.push_back(x);
    return j;
}

int mass_lab_threads() {
    const char* env = std::getenv("MASS_LAB_THREADS");
    int t = env ? std::atoi(env) : 0;
    if (t <= 0) t = 1;
    return t;
}

void emit(const json& doc, const std::string& out_path) {
    std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        f << text;
    }
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

json run_cosets(int d, int64_t p, const std::string& a_str, bool with_reps) {
    heckelab::Cocharacter a(parse_int_list(a_str));
    heckelab::DoubleCosetKey key{p, d, heckelab::dominant_representative(a)};
    auto reps = heckelab::enumerate_cosets(key);
    json j;
    j["count"] = static_cast<int64_t>(reps.size());
    heckelab::Int delta =
        heckelab::pow_int(heckelab::Int(p),
                          static_cast<unsigned>(heckelab::two_rho_pairing(key.a)));
    j["delta_sq"] = delta.str();
    j["ratio"] = heckelab::rat_to_string(Rat(heckelab::Int(reps.size()), delta));
    if (with_reps) {
        json arr = json::array();
        for (const auto& r : reps) {
            json m = json::array();
            for (int i = 0; i < d; ++i) {
                json row = json::array();
                for (int c = 0; c < d; ++c) row.push_back(r.matrix.at(i, c));
                m.push_back(row);
            }
            arr.push_back(m);
        }
        j["reps"] = arr;
    }
    return j;
}

json run_satake(int d, int64_t p, const std::string& a_str) {
    heckelab::Cocharacter a =
        heckelab::dominant_representative(heckelab::Cocharacter(parse_int_list(a_str)));
    auto poly = heckelab::basis_transform(p, a);
    json j;
    j["a"] = cochar_json(a);
    json terms = json::array();
    for (const auto& [k, c] : poly.terms) {
        json t;
        t["orbit"] = cochar_json(k);
        t["coefficient"] = sqrtext_json(c);
        terms.push_back(t);
    }
    j["transform"] = terms;
    j["coset_count"] = heckelab::coset_count_spectral(p, a).str();
    return j;
}

json run_plancherel_check(int d, int64_t p, double rmax) {
    // Every dominant cocharacter with norm <= rmax.
    std::vector<heckelab::Cocharacter> as;
    int64_t cap = static_cast<int64_t>(rmax * 2) + 1;
    std::vector<int64_t> v(d, 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == d - 1) {
            heckelab::Cocharacter c(v);
            if (c.is_dominant() && heckelab::cochar_norm(c) <= rmax + 1e-12) as.push_back(c);
            return;
        }
        for (int64_t x = 0; x <= cap; ++x) {
            v[pos] = x;
            rec(pos + 1);
        }
    };
    rec(0);
    json rows = json::array();
    double worst = 0;
    for (const auto& a : as) {
        auto poly = heckelab::to_complex(heckelab::basis_transform(p, a));
        double n2 = heckelab::plancherel_inner(poly, poly);
        double count = heckelab::to_double(Rat(heckelab::coset_count_spectral(p, a)));
        double resid = std::abs(n2 - count) / count;
        worst = std::max(worst, resid);
        json r;
        r["a"] = cochar_json(a);
        r["norm_sq_quadrature"] = fmt_double(n2);
        r["coset_count"] = fmt_double(count);
        r["residual"] = fmt_double(resid);
        rows.push_back(r);
    }
    auto one = heckelab::WSymLaurent{};
    one.p = p;
    one.d = d;
    one.add(heckelab::zero_cocharacter(d), Cplx(1.0));
    double mass = heckelab::plancherel_inner(one, one);
    json j;
    j["elements"] = rows;
    j["max_residual"] = fmt_double(worst);
    j["total_mass"] = fmt_double(mass);
    j["pass"] = worst < 1e-8 && std::abs(mass - 1.0) < 1e-8;
    return j;
}

json amplifier_result_json(const heckelab::AmplifierResult& r) {
    json j;
    j["chosen_a"] = cochar_json(r.chosen_a);
    j["phase"] = complex_json(r.phase);
    j["lambda"] = fmt_double(r.lambda);
    j["support_size"] = r.support_size.str();
    j["m_value"] = fmt_double(r.m_value);
    j["k1_at_identity"] = fmt_double(r.k1_at_identity);
    j["norm_ratio"] = fmt_double(r.norm_ratio);
    j["ell"] = r.ell;
    j["ell_prime"] = r.ell_prime;
    j["trusted"] = r.trusted;
    j["floor_ok"] = r.floor_ok;
    json contrib = json::array();
    for (const auto& [a, c] : r.contributions) {
        json row;
        row["a"] = cochar_json(a);
        row["contribution"] = fmt_double(c);
        contrib.push_back(row);
    }
    j["per_coset_contributions"] = contrib;
    return j;
}

json run_amplify(int d, int64_t p, const std::string& nu_str, const std::string& sweep,
                 uint64_t seed, double floor, int64_t p0) {
    json j;
    auto ctx = heckelab::make_amplifier_context(d, p);
    if (!sweep.empty()) {
        auto colon = sweep.find(':');
        if (sweep.substr(0, colon) != "tempered" || colon == std::string::npos)
            throw std::invalid_argument("sweep must look like tempered:N");
        int n = std::stoi(sweep.substr(colon + 1));
        heckelab::Rng rng(seed);
        json rows = json::array();
        double worst = 1e300;
        int failures = 0;
        for (int t = 0; t < n; ++t) {
            std::vector<double> theta(d - 1);
            for (auto& x : theta) x = rng.uniform(0, 2 * M_PI);
            auto nu0 = heckelab::tempered_parameter(p, d, theta);
            auto res = heckelab::build_amplifier_ctx(ctx, nu0, floor, p0);
            worst = std::min(worst, res.norm_ratio);
            if (!res.floor_ok) ++failures;
            json row;
            row["theta"] = theta;
            row["norm_ratio"] = fmt_double(res.norm_ratio);
            row["chosen_a"] = cochar_json(res.chosen_a);
            row["floor_ok"] = res.floor_ok;
            rows.push_back(row);
        }
        j["sweep"] = rows;
        j["min_norm_ratio"] = fmt_double(worst);
        j["floor_failures"] = failures;
    } else {
        auto z = parse_complex_list(nu_str);
        heckelab::SpectralParameter nu0(p, z);
        j["result"] = amplifier_result_json(heckelab::build_amplifier_ctx(ctx, nu0, floor, p0));
    }
    return j;
}

heckelab::AlgebraSpec load_algebra_spec(const std::string& path) {
    if (path.empty()) return heckelab::matrix_algebra(2);
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open algebra spec: " + path);
    json j = json::parse(f);
    heckelab::AlgebraSpec s;
    s.dim = j.at("dim").get<int>();
    s.degree = j.at("degree").get<int>();
    for (const auto& v : j.at("structure_constants"))
        s.structure.push_back(heckelab::rat_from_string(v.get<std::string>()));
    for (const auto& v : j.at("unit"))
        s.unit.push_back(heckelab::rat_from_string(v.get<std::string>()));
    s.lattice_basis = heckelab::matrix_from_json(j.at("lattice_basis"));
    s.gram = heckelab::matrix_from_json(j.at("gram"));
    s.validate();
    return s;
}

json run_dioph(const std::string& spec_path, const std::string& demo, uint64_t seed) {
    heckelab::AlgebraSpec spec = load_algebra_spec(spec_path);
    heckelab::Rng rng(seed);
    json j;
    if (demo == "colinear") {
        // Exhaustive small-denominator scan near the segment (0,0)-(1,0).
        int64_t m = 3;
        int checked = 0, colinear = 0;
        std::vector<heckelab::PlanePoint> pts;
        for (int64_t den = 1; den <= m; ++den)
            for (int64_t num = 0; num <= den; ++num)
                pts.push_back({Rat(num, den), Rat(0)});
        for (size_t a = 0; a < pts.size(); ++a)
            for (size_t b = a + 1; b < pts.size(); ++b)
                for (size_t c = b + 1; c < pts.size(); ++c) {
                    ++checked;
                    if (heckelab::colinear_toy(pts[a], pts[b], pts[c], heckelab::Int(m), 1e-9))
                        ++colinear;
                }
        j["triples_checked"] = checked;
        j["colinear"] = colinear;
        j["all_colinear"] = checked == colinear;
    } else if (demo == "nearsub") {
        std::vector<heckelab::AlgebraElement> sbasis;
        for (int i = 0; i < spec.degree; ++i) {
            heckelab::AlgebraElement e(spec.dim, Rat(0));
            e[i * spec.degree + i] = 1;
            sbasis.push_back(e);
        }
        std::vector<heckelab::AlgebraElement> pts;
        for (int t = 0; t < 4; ++t) {
            heckelab::AlgebraElement x(spec.dim, Rat(0));
            for (int i = 0; i < spec.degree; ++i)
                x[i * spec.degree + i] = Rat(rng.range(-3, 3), rng.range(1, 4));
            pts.push_back(x);
        }
        auto rep = heckelab::near_subalgebra_test(pts, sbasis, Rat(0), Rat(10),
                                                  heckelab::Int(24), spec);
        j["dim"] = rep.dim;
        j["proper"] = rep.proper;
        j["condition_holds"] = rep.condition_holds;
        j["counterexample"] = rep.counterexample;
    } else if (demo == "badprimes") {
        heckelab::AlgebraElement alpha(spec.dim, Rat(0));
        for (int i = 0; i < spec.dim; ++i) alpha[i] = Rat(rng.range(-9, 9));
        auto lift = heckelab::clear_denominator_lift(alpha, spec);
        auto rep = heckelab::bad_primes(lift.lifted, spec);
        j["degenerate"] = rep.degenerate;
        if (!rep.degenerate) {
            j["discriminant"] = rep.discriminant.str();
            json primes = json::array();
            for (const auto& p : rep.primes) primes.push_back(p.str());
            j["primes"] = primes;
        }
        j["log_norm"] = fmt_double(rep.log_norm);
    } else {
        throw std::invalid_argument("unknown demo: " + demo);
    }
    return j;
}

json run_mass_lab(const std::string& check, const std::string& model_path, int trials,
                  uint64_t seed) {
    heckelab::FiniteModel model;
    std::vector<std::vector<int>> translates;
    if (!model_path.empty()) {
        std::ifstream f(model_path);
        if (!f) throw std::invalid_argument("cannot open model: " + model_path);
        model = heckelab::model_from_json(json::parse(f), &translates);
    } else {
        heckelab::Rng mr(seed ^ 0x6d6f64656cULL);
        model = heckelab::random_l1_model(mr, 48, 24, 3);
        model.validate();
    }
    auto fam = heckelab::BallFamily::build(model, Rat(4));
    json j;
    // worker count goes to stderr with the timings: the payload must not
    // depend on the execution environment
    std::cerr << "threads: " << mass_lab_threads() << "\n";
    if (check == "cov1") {
        auto res = heckelab::maximal_separated_cover(model, fam);
        j["centers"] = res.centers;
        j["covers"] = res.covers;
        j["max_multiplicity"] = res.max_multiplicity;
        j["mult30"] = fmt_double(res.mult30);
        j["multiplicity_ok"] = res.multiplicity_ok;
    } else if (check == "cov2") {
        int threads = mass_lab_threads();
        std::vector<std::future<int>> futures;
        int per = (trials + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            futures.push_back(std::async(std::launch::async, [&, t]() {
                int violations = 0;
                for (int i = t * per; i < std::min(trials, (t + 1) * per); ++i) {
                    heckelab::Rng rng(seed + 1000003ULL * static_cast<uint64_t>(i));
                    std::vector<int> ys;
                    int r = 2 + static_cast<int>(rng.below(30));
                    for (int k = 0; k < r; ++k)
                        ys.push_back(static_cast<int>(rng.below(model.n)));
                    if (!heckelab::cov2_check(model, ys, fam).ok) ++violations;
                }
                return violations;
            }));
        }
        int violations = 0;
        for (auto& f : futures) violations += f.get();
        j["trials"] = trials;
        j["violations"] = violations;
        j["pass"] = violations == 0;
    } else if (check == "cover") {
        auto cyc = heckelab::cycle_model(36);
        auto cfam = heckelab::BallFamily::build(cyc, Rat(1));
        int checked = 0, holds = 0;
        for (int t = 0; t < std::max(trials, 1); ++t) {
            heckelab::Rng rng(seed + 77ULL * static_cast<uint64_t>(t));
            std::vector<int> shifts = {1, 35, static_cast<int>(rng.below(18)) + 2};
            shifts.push_back(36 - shifts[2]);
            std::vector<Cplx> w = {1.0, 1.0, 0.7, 0.7};
            for (int k = 0; k < 36; ++k) {
                auto corr = heckelab::circulant_correspondence(36, shifts, w, k);
                if (std::abs(corr.lambda) < 1e-9) continue;
                corr.validate(cyc);
                auto res = heckelab::mass_bound_check(cyc, corr, 0, cfam);
                ++checked;
                if (res.ok) ++holds;
            }
        }
        j["checked"] = checked;
        j["holds"] = holds;
        j["pass"] = checked == holds;
    } else if (check == "decay") {
        auto hm = heckelab::hypercube_model(6);
        auto corr = heckelab::hypercube_correspondence(6, {0, 1, 2, 3, 4, 5},
                                                       {1, 1, 1, 1, 1, 1}, 0b101101u);
        corr.validate(hm);
        auto res = heckelab::tube_decay_experiment(
            hm, corr, 0, {Rat(1), Rat(2), Rat(3), Rat(4), Rat(5)});
        json table = json::array();
        for (const auto& row : res.table) {
            json r;
            r["eps"] = fmt_double(row.eps);
            r["mass"] = fmt_double(row.mass);
            table.push_back(r);
        }
        j["table"] = table;
        j["fitted_exponent"] = fmt_double(res.exponent);
        j["degenerate"] = res.degenerate;
        j["positive"] = res.exponent > 0;
    } else {
        throw std::invalid_argument("unknown check: " + check);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hecke double-coset and spectral-bound laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // allow --seed/--out/--config after the subcommand

    std::string config_path, out_path;
    uint64_t seed = 1;
    app.add_option("--config", config_path, "JSON file with flag overrides");
    app.add_option("--out", out_path, "output path (default stdout)");
    app.add_option("--seed", seed, "64-bit seed");

    int d = 2;
    int64_t p = 5;
    std::string a_str = "1,0", nu_str = "", sweep, demo = "colinear", check = "cov2";
    std::string spec_path, model_path;
    double rmax = 3.0, floor = 0.05;
    int trials = 100;
    int64_t p0 = 5;
    bool with_reps = false;

    auto* cosets = app.add_subcommand("cosets", "enumerate double-coset representatives");
    cosets->add_option("--d", d)->required();
    cosets->add_option("--p", p)->required();
    cosets->add_option("--a", a_str)->required();
    cosets->add_flag("--reps", with_reps);

    auto* satake = app.add_subcommand("satake", "spherical transform of a basis element");
    satake->add_option("--d", d)->required();
    satake->add_option("--p", p)->required();
    satake->add_option("--a", a_str)->required();

    auto* plch = app.add_subcommand("plancherel-check", "quadrature vs exact coset counts");
    plch->add_option("--d", d)->required();
    plch->add_option("--p", p)->required();
    plch->add_option("--rmax", rmax);

    auto* amp = app.add_subcommand("amplify", "build the spectral amplifier");
    amp->add_option("--d", d)->required();
    amp->add_option("--p", p)->required();
    amp->add_option("--nu", nu_str);
    amp->add_option("--sweep", sweep);
    amp->add_option("--floor", floor);
    amp->add_option("--p0", p0);

    auto* dioph = app.add_subcommand("dioph", "exact algebra demos");
    dioph->add_option("--spec", spec_path);
    dioph->add_option("--demo", demo);

    auto* mass = app.add_subcommand("mass-lab", "finite-model covering and mass bounds");
    mass->add_option("--check", check);
    mass->add_option("--model", model_path);
    mass->add_option("--trials", trials);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        json err;
        err["error"] = e.what();
        std::cout << err.dump(2) << "\n";
        return 2;
    }

    // --config overrides defaults (flags given on the command line win).
    if (!config_path.empty()) {
        try {
            std::ifstream f(config_path);
            if (!f) throw std::invalid_argument("cannot open config: " + config_path);
            json cfg = json::parse(f);
            if (cfg.contains("seed") && app.count("--seed") == 0)
                seed = cfg["seed"].get<uint64_t>();
            if (cfg.contains("trials") && mass->count("--trials") == 0)
                trials = cfg["trials"].get<int>();
            if (cfg.contains("floor") && amp->count("--floor") == 0)
                floor = cfg["floor"].get<double>();
            if (cfg.contains("rmax") && plch->count("--rmax") == 0)
                rmax = cfg["rmax"].get<double>();
        } catch (const std::exception& e) {
            json err;
            err["error"] = e.what();
            std::cout << err.dump(2) << "\n";
            return 2;
        }
    }

    Timer timer;
    json doc;
    doc["config"]["seed"] = seed;
    doc["config"]["version"] = "1.0.0";
    int rc = 0;
    try {
        if (cosets->parsed()) {
            doc["config"]["command"] = "cosets";
            doc["config"]["d"] = d;
            doc["config"]["p"] = p;
            doc["config"]["a"] = a_str;
            doc.update(run_cosets(d, p, a_str, with_reps));
        } else if (satake->parsed()) {
            doc["config"]["command"] = "satake";
            doc["config"]["d"] = d;
            doc["config"]["p"] = p;
            doc["config"]["a"] = a_str;
            doc.update(run_satake(d, p, a_str));
        } else if (plch->parsed()) {
            doc["config"]["command"] = "plancherel-check";
            doc["config"]["d"] = d;
            doc["config"]["p"] = p;
            doc["config"]["rmax"] = rmax;
            doc.update(run_plancherel_check(d, p, rmax));
        } else if (amp->parsed()) {
            doc["config"]["command"] = "amplify";
            doc["config"]["d"] = d;
            doc["config"]["p"] = p;
            doc["config"]["nu"] = nu_str;
            doc["config"]["sweep"] = sweep;
            doc.update(run_amplify(d, p, nu_str, sweep, seed, floor, p0));
        } else if (dioph->parsed()) {
            doc["config"]["command"] = "dioph";
            doc["config"]["demo"] = demo;
            doc.update(run_dioph(spec_path, demo, seed));
        } else if (mass->parsed()) {
            doc["config"]["command"] = "mass-lab";
            doc["config"]["check"] = check;
            doc["config"]["trials"] = trials;
            doc.update(run_mass_lab(check, model_path, trials, seed));
        }
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cout << err.dump(2) << "\n";
        return 1;
    }
    emit(doc, out_path);
    std::cerr << "done in " << timer.ms() << " ms\n";
    return rc;
}
