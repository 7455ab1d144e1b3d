// chiral: command line front end for the field calculus library.
//
// Every subcommand prints a short summary on stdout and, with --report,
// writes one JSON record per check to the given file. Exit status is 0 when
// every check passes, 1 when one fails and 2 on usage errors.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "chiral/residue.hpp"
#include "chiral/suite.hpp"

using namespace chiral;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "chiral-report/1";

struct Common {
    int n = 2;
    int M = 12;
    int M_pair = 8;
    int K = 3;
    unsigned seed = 1;
    int samples = 0;
    int window = 4;
    std::string params;
    std::string report;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Run {
    std::string command;
    std::vector<Report> reports;
    std::vector<std::pair<std::string, std::string>> values; // computed outputs
};

SigmaConfig make_config(const Common& c, int M)
{
    if (c.n < 1) throw UsageError("--n must be at least 1");
    if (c.params.empty()) return SigmaConfig(c.n, M);
    std::vector<std::string> names;
    std::istringstream in(c.params);
    for (std::string tok; std::getline(in, tok, ',');) names.push_back(tok);
    if (int(names.size()) != c.n) throw UsageError("--params names " + std::to_string(names.size()) + " parameters for n=" + std::to_string(c.n));
    return SigmaConfig(names, M);
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string tok; std::getline(in, tok, ',');)
        if (!tok.empty()) out.push_back(tok);
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --input file or --basis "m,i;m,i" over the common config
PhiSeries input_series(const Common& c, const std::string& input, const std::string& basis)
{
    if (!input.empty()) return phiseries_from_text(read_file(input));
    if (basis.empty()) throw UsageError("give --input or --basis");
    SigmaConfig cfg = make_config(c, c.M);
    PhiSeries f(cfg);
    std::istringstream in(basis);
    for (std::string term; std::getline(in, term, ';');) {
        int m, i;
        char comma;
        std::istringstream ts(term);
        if (!(ts >> m >> comma >> i) || comma != ',') throw UsageError("bad basis term '" + term + "', expected m,i");
        if (i < 0 || i >= cfg.n()) throw UsageError("basis position " + std::to_string(i) + " out of range");
        f += PhiSeries::basis(cfg, m, i);
    }
    return f;
}

json record(const std::string& command, const Report& r, const Common& c)
{
    json j;
    j["schema"] = kSchema;
    j["command"] = command;
    j["check"] = r.check;
    j["verdict"] = r.pass ? "pass" : "fail";
    j["cases"] = r.cases;
    if (r.window.size() > 0) j["window"] = {r.window.lo, r.window.hi};
    if (r.K > 0) j["K"] = r.K;
    j["seed"] = c.seed;
    json info = json::object();
    for (auto& [k, v] : r.info) info[k] = v;
    j["info"] = info;
    j["residuals"] = r.residuals;
    return j;
}

Report computed(const std::string& check)
{
    Report r;
    r.check = check;
    r.cases = 1;
    return r;
}

// ------------------------------------------------------------------ commands

Run cmd_residue(const Common& c, const std::string& input, const std::string& basis, const std::string& subst)
{
    Run run{"residue", {}, {}};
    if (input.empty() && basis.empty()) {
        int samples = c.samples > 0 ? c.samples : 200;
        run.reports.push_back(residue_suite(c.n, samples, std::max(1, samples / 2), c.seed));
        return run;
    }
    PhiSeries f = input_series(c, input, basis);
    Scalar res = residue(OneForm(f));
    run.values.emplace_back("Res(f dt)", res.str());
    Report r = computed("residue");
    r.note("residue", res.str());
    if (!subst.empty()) {
        Substitution s = parse_substitution(subst);
        auto parts = residue_split(OneForm(f), s);
        Scalar sum;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            run.values.emplace_back("Res at point " + std::to_string(i + 1), parts[i].str());
            r.note("point " + std::to_string(i + 1), parts[i].str());
            sum += parts[i];
        }
        if (sum != specialize(res, s)) r.fail("point residues sum to " + sum.str() + ", not " + specialize(res, s).str());
    }
    run.reports.push_back(r);
    return run;
}

Run cmd_pairing_table(const Common& c)
{
    Run run{"pairing-table", {}, {}};
    Window w = Window::centered(c.window);
    SigmaConfig cfg = make_config(c, std::max(w.hi + 2, 4));
    std::vector<PhiSeries> plus, minus;
    std::vector<std::string> rows, cols;
    for (int m = w.lo; m < w.hi; ++m)
        for (int i = 0; i < cfg.n(); ++i) {
            plus.push_back(PhiSeries::basis(cfg, m, i));
            rows.push_back("p+[" + std::to_string(m) + "," + std::to_string(i) + "]");
        }
    for (int m = -1 - (w.hi - 1); m <= -1 - w.lo; ++m)
        for (int j = 0; j < cfg.n(); ++j) {
            minus.push_back(PhiSeries::minus_basis(cfg, m, j));
            cols.push_back("p-[" + std::to_string(m) + "," + std::to_string(j) + "]");
        }
    Report r;
    r.check = "pairing-table";
    r.window = w;
    std::ostringstream table;
    table << "rows: plus basis, columns: minus basis\n" << std::string(12, ' ');
    for (auto& h : cols) table << " " << h;
    table << "\n";
    for (std::size_t a = 0; a < plus.size(); ++a) {
        table << rows[a] << std::string(rows[a].size() < 12 ? 12 - rows[a].size() : 0, ' ');
        int m = w.lo + int(a) / cfg.n(), i = int(a) % cfg.n();
        for (std::size_t b = 0; b < minus.size(); ++b) {
            int mm = -1 - (w.hi - 1) + int(b) / cfg.n(), j = int(b) % cfg.n();
            Scalar v = pairing(plus[a], minus[b]);
            Scalar expect = (m + mm == -1 && i + j == cfg.n() - 1) ? Scalar(1) : Scalar(0);
            ++r.cases;
            if (v != expect) r.fail("<" + rows[a] + ", " + cols[b] + "> = " + v.str());
            std::string cell = v.str();
            table << " " << std::string(cols[b].size() > cell.size() ? cols[b].size() - cell.size() : 0, ' ') << cell;
        }
        table << "\n";
    }
    r.note("n", std::to_string(cfg.n()));
    run.values.emplace_back("table", table.str());
    run.reports.push_back(r);
    return run;
}

Run cmd_expand_delta(const Common& c, int k, const std::string& side, bool print)
{
    Run run{"expand-delta", {}, {}};
    if (k < 1) throw UsageError("--k must be at least 1");
    if (side != "right" && side != "left" && side != "both") throw UsageError("--side is right, left or both");
    SigmaConfig cfg = make_config(c, 2 * c.M_pair + 2 * k);
    TwoVarSeries dk = delta(cfg);
    for (int j = 1; j < k; ++j) dk = dk * delta(cfg);
    for (const char* s : {"right", "left"}) {
        if (side != "both" && side != s) continue;
        bool right = std::string(s) == "right";
        TwoVarSeries e = right ? exp_r(k, cfg, c.M_pair) : exp_l(k, cfg, c.M_pair);
        Report r;
        r.check = std::string("expand-") + s;
        ++r.cases;
        TwoVarSeries rest = dk * e - TwoVarSeries::one(cfg);
        if (!rest.exact_part().is_zero()) r.fail("delta^k exp - 1 has exact terms:\n" + to_text(rest.exact_part()));
        r.note("k", std::to_string(k));
        r.note("M_pair", std::to_string(c.M_pair));
        r.note("terms", std::to_string(e.coeffs().size()));
        if (print) run.values.emplace_back(std::string("Exp^") + (right ? "r" : "l") + " delta^-" + std::to_string(k), to_text(e));
        run.reports.push_back(r);
    }
    return run;
}

Run cmd_cauchy(const Common& c, int max_pole)
{
    Run run{"cauchy-check", {}, {}};
    if (c.M_pair < max_pole + 2) throw UsageError("--M-pair must be at least max pole + 2");
    run.reports.push_back(cauchy_suite(c.n, std::max(c.M, 2 * c.M_pair), c.M_pair, max_pole, c.samples > 0 ? c.samples : 50, c.seed));
    return run;
}

std::vector<Field> fields_from(const Common& c, const std::string& list, std::size_t count, const SigmaConfig& cfg, const AlgebraPtr& U)
{
    auto names = split_list(list);
    if (names.size() != count) throw UsageError("--fields needs " + std::to_string(count) + " comma separated names");
    std::vector<Field> out;
    for (auto& nm : names) {
        auto known = field_names();
        if (std::find(known.begin(), known.end(), nm) == known.end()) throw UsageError("unknown field '" + nm + "'");
        out.push_back(named_field(nm, cfg, U));
    }
    (void)c;
    return out;
}

Run cmd_locality(const Common& c, const std::string& fields, int max_k, int expect)
{
    Run run{"locality", {}, {}};
    SigmaConfig cfg = make_config(c, 30);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, c.K);
    auto F = fields_from(c, fields, 2, cfg, U);
    auto res = locality_order(F[0], F[1], max_k, Window::centered(c.window), c.K);
    Report r;
    r.check = "locality";
    r.window = res.window;
    r.K = c.K;
    r.cases = res.pairs;
    std::string order = res.order ? std::to_string(*res.order) : "none up to " + std::to_string(max_k);
    r.note("fields", fields);
    r.note("order", order);
    if (!res.order) r.fail("not local up to order " + std::to_string(max_k) + " on the window");
    else if (expect >= 0 && *res.order != expect) r.fail("order " + order + ", expected " + std::to_string(expect));
    run.values.emplace_back("locality order", order);
    run.reports.push_back(r);
    return run;
}

Run cmd_jacobi(const Common& c, const std::string& fields, int pole, const std::string& poles)
{
    Run run{"jacobi-check", {}, {}};
    std::array<int, 3> e{pole, pole, pole};
    if (!poles.empty()) {
        auto p = split_list(poles);
        if (p.size() != 3) throw UsageError("--poles takes e01,e02,e12");
        for (int i = 0; i < 3; ++i) e[std::size_t(i)] = std::stoi(p[std::size_t(i)]);
    }
    SigmaConfig cfg = make_config(c, 30);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, c.K);
    auto F = fields_from(c, fields, 3, cfg, U);
    Report r = jacobi_check({F[0], F[1], F[2]}, e, Window::centered(c.window), c.K);
    r.note("fields", fields);
    r.note("poles", std::to_string(e[0]) + "," + std::to_string(e[1]) + "," + std::to_string(e[2]));
    run.reports.push_back(r);
    return run;
}

Run cmd_unit(const Common& c, const std::string& fields)
{
    Run run{"unit-check", {}, {}};
    SigmaConfig cfg = make_config(c, 30);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, c.K);
    auto names = split_list(fields);
    if (names.empty()) throw UsageError("--fields is empty");
    std::mt19937 rng(c.seed);
    int samples = c.samples > 0 ? c.samples : 10;
    for (auto& nm : names) {
        Field X = fields_from(c, nm, 1, cfg, U)[0];
        Report r;
        r.check = "unit-axiom " + nm;
        for (int k = 0; k < samples; ++k) {
            PhiSeries f = random_series(cfg, rng, -1, 1, 2), g = random_series(cfg, rng, -1, 1, 2), h = random_series(cfg, rng, -1, 1, 2);
            Report one = unit_axiom_check(X, f, g, h, Window::centered(c.window), c.K);
            r.window = one.window;
            r.K = one.K;
            one.info.clear();
            r.merge(one);
        }
        r.note("field", nm);
        run.reports.push_back(r);
    }
    return run;
}

Run cmd_mu12(const Common& c, const std::string& fields)
{
    Run run{"mu12-check", {}, {}};
    SigmaConfig cfg = make_config(c, 30);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, c.K);
    auto F = fields_from(c, fields, 2, cfg, U);
    std::mt19937 rng(c.seed);
    ThreeVarSeries num = tensor(random_series(cfg, rng, 0, 1, 2), PhiSeries::one(cfg), random_series(cfg, rng, 0, 1, 2));
    for (int h = 0; h <= 1; ++h) {
        Report r;
        r.check = "mu12-h" + std::to_string(h);
        for (int p = 0; p <= 1; ++p)
            for (int q = 0; q <= 1; ++q) {
                Report one = mu12_compat_check(F[0], F[1], h, p, q, num, Window::centered(c.window), c.K);
                r.window = one.window;
                r.K = one.K;
                one.info.clear();
                r.merge(one);
            }
        r.note("fields", fields);
        run.reports.push_back(r);
    }
    return run;
}

Run cmd_generate(const Common& c, const std::string& gens, int steps, int probe_n, int probe_m)
{
    Run run{"generate", {}, {}};
    SigmaConfig cfg = make_config(c, 30);
    AlgebraPtr U = CoeffAlgebra::heisenberg(cfg, c.K);
    auto names = split_list(gens);
    std::vector<Field> G;
    for (auto& nm : names) G.push_back(fields_from(c, nm, 1, cfg, U)[0]);
    GenerationOptions opt;
    opt.window = Window::centered(c.window);
    opt.K = c.K;
    auto res = generate_basic(G, steps, opt);
    Report r = res.report;
    r.check = "generation";
    for (std::size_t l = 0; l < res.layers.size(); ++l) {
        std::string labels;
        for (auto& s : res.layers[l].labels) labels += (labels.empty() ? "" : "; ") + s;
        r.note("V(" + std::to_string(l) + ")", std::to_string(res.layers[l].gens.size()) + " generators");
        run.values.emplace_back("V(" + std::to_string(l) + ")", labels.empty() ? "(central only)" : labels);
    }
    run.reports.push_back(r);
    if (probe_n >= 0) {
        Report p = generation_probes(res, probe_n, probe_m, opt);
        p.check = "generation-probes";
        run.reports.push_back(p);
    }
    return run;
}

Run cmd_fact_split(const Common& c, const std::string& input, const std::string& basis, const std::string& partition, const std::string& subst)
{
    Run run{"fact-split", {}, {}};
    PhiSeries f = input_series(c, input, basis);
    if (partition.empty()) throw UsageError("--partition is required");
    Partition p = parse_partition(partition, f.config().n());
    Factorization fz(f.config(), p, subst.empty() ? Substitution() : parse_substitution(subst));
    auto parts = fz.split(f);
    Report r = computed("fact-split");
    for (std::size_t b = 0; b < parts.size(); ++b) {
        run.values.emplace_back("block " + std::to_string(b + 1), to_text(parts[b]));
        r.note("block " + std::to_string(b + 1), parts[b].str());
    }
    PhiSeries back = fz.merge(parts);
    PhiSeries want = subst.empty() ? f : substitute(f, parse_substitution(subst));
    int v = std::min({back.valid_below(), want.valid_below(), want.config().M()});
    ++r.cases;
    if (!(back - want.with_config(back.config())).truncated(v).is_zero()) r.fail("merge(split(f)) differs from f");
    r.note("partition", p.str());
    run.reports.push_back(r);
    return run;
}

Run cmd_ran_merge(const Common& c, const std::string& input, const std::string& basis, const std::string& collision, int M)
{
    Run run{"ran-merge", {}, {}};
    PhiSeries f = input_series(c, input, basis);
    if (collision.empty()) throw UsageError("--collision is required");
    Partition p = parse_partition(collision, f.config().n());
    PhiSeries img = ran_merge(f, p, M);
    run.values.emplace_back("image", to_text(img));
    Report r = computed("ran-merge");
    r.note("image", img.str());
    r.note("collision", p.str());
    // ring homomorphism on the input itself
    PhiSeries sq = ran_merge(f * f, p, M), prod = img * img;
    int v = std::min({sq.valid_below(), prod.valid_below(), img.config().M()});
    ++r.cases;
    if (!(sq - prod).truncated(v).is_zero()) r.fail("ran(f f) != ran(f) ran(f)");
    run.reports.push_back(r);
    return run;
}

Run cmd_fact_axioms(const Common& c, bool with_mu)
{
    Run run{"fact-axioms", {}, {}};
    run.reports.push_back(fact_axioms_check(c.n, c.M, c.samples > 0 ? c.samples : 6, c.seed));
    if (with_mu) {
        Substitution s;
        for (int i = 0; i < c.n; ++i) s.set("a" + std::to_string(i + 1), mpq_class(i * (i + 1) / 2));
        SigmaConfig cfg = SigmaConfig(c.n, std::max(c.M, 12)).substituted(s);
        std::vector<Partition> parts = {Partition::discrete(c.n)};
        if (c.n >= 2) {
            std::vector<int> m(std::size_t(c.n), 0);
            m.back() = 1;
            parts.push_back(Partition(m));
        }
        for (auto& p : parts)
            for (int pole = 0; pole <= 1; ++pole) run.reports.push_back(fact_mu_check(Factorization(cfg, p), pole, Window::centered(3), c.K));
    }
    return run;
}

Run cmd_selftest(const Common& c, const std::string& only)
{
    Run run{"selftest", {}, {}};
    std::set<int> ids;
    for (auto& s : split_list(only)) ids.insert(std::stoi(s));
    SuiteOptions opt;
    opt.seed = c.seed;
    opt.samples = c.samples;
    for (auto& crit : acceptance_criteria()) {
        if (!ids.empty() && !ids.count(crit.id)) continue;
        Report r = crit.run(opt);
        r.check = "criterion " + std::to_string(crit.id) + ": " + crit.name;
        run.reports.push_back(r);
    }
    return run;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact multipoint field calculus: residues, expansions, chiral products and factorization"};
    app.set_config("--config", "", "declarative TOML/INI configuration; flags override it");
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--n", c.n, "number of marked points")->capture_default_str();
    app.add_option("--M", c.M, "phi-adic truncation")->capture_default_str();
    app.add_option("--M-pair", c.M_pair, "expansion depth of the pair ring")->capture_default_str();
    app.add_option("--K", c.K, "Heisenberg truncation level")->capture_default_str();
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();
    app.add_option("--samples", c.samples, "random instances (0: command default)")->capture_default_str();
    app.add_option("--window", c.window, "window width W (codes -W/2 .. W - W/2 - 1)")->capture_default_str();
    app.add_option("--params", c.params, "comma separated parameter names for a1..an");
    app.add_option("--report", c.report, "write JSONL records to this file");

    std::string input, basis, subst, fields = "beta,beta", partition, collision, side = "both", poles, only, gens = "beta";
    int k = 1, max_pole = 3, max_k = 4, expect = -1, pole = 1, steps = 3, probe_n = 1, probe_m = 1, ran_M = 0;
    bool print = false, no_mu = false;

    auto* residue_cmd = app.add_subcommand("residue", "Res(f dt) of a series, or the residue property suite");
    residue_cmd->add_option("--input", input, "series text file");
    residue_cmd->add_option("--basis", basis, "sum of plus basis elements, \"m,i;m,i\"");
    residue_cmd->add_option("--subst", subst, "split the residue over points, \"a1=0,a2=1\"");

    auto* pairing_cmd = app.add_subcommand("pairing-table", "Gram matrix of the plus and minus bases");

    auto* expand_cmd = app.add_subcommand("expand-delta", "right and left expansions of delta^-k");
    expand_cmd->add_option("--k", k, "pole order")->capture_default_str();
    expand_cmd->add_option("--side", side, "right, left or both")->capture_default_str();
    expand_cmd->add_flag("--print", print, "print the expansions");

    auto* cauchy_cmd = app.add_subcommand("cauchy-check", "Cauchy formula on random poly tensors");
    cauchy_cmd->add_option("--max-pole", max_pole, "largest pole order of the samples")->capture_default_str();

    auto* locality_cmd = app.add_subcommand("locality", "mutual locality order of two fields");
    locality_cmd->add_option("--fields", fields, "two of " + CLI::detail::join(field_names()))->capture_default_str();
    locality_cmd->add_option("--max-k", max_k, "largest order tried")->capture_default_str();
    locality_cmd->add_option("--expect", expect, "required order");

    auto* jacobi_cmd = app.add_subcommand("jacobi-check", "nu + rho nu + rho^2 nu on window triples");
    jacobi_cmd->add_option("--fields", fields, "three field names")->required();
    jacobi_cmd->add_option("--pole", pole, "diagonal pole order of every pair")->capture_default_str();
    jacobi_cmd->add_option("--poles", poles, "e01,e02,e12");

    auto* unit_cmd = app.add_subcommand("unit-check", "unit axiom and the Phi formula");
    unit_cmd->add_option("--fields", fields, "fields X to test")->capture_default_str();

    auto* mu12_cmd = app.add_subcommand("mu12-check", "mu^{1,2} compatibility for h = 0, 1");
    mu12_cmd->add_option("--fields", fields, "two field names")->capture_default_str();

    auto* gen_cmd = app.add_subcommand("generate", "basic generation V(0..steps)");
    gen_cmd->add_option("--generators", gens, "generating fields")->capture_default_str();
    gen_cmd->add_option("--steps", steps, "number of layers after V(0)")->capture_default_str();
    gen_cmd->add_option("--probe-n", probe_n, "closure probes up to V(n), -1 to skip")->capture_default_str();
    gen_cmd->add_option("--probe-m", probe_m, "closure probes up to pole m")->capture_default_str();

    auto* split_cmd = app.add_subcommand("fact-split", "split a series along a partition of the points");
    split_cmd->add_option("--input", input, "series text file");
    split_cmd->add_option("--basis", basis, "sum of plus basis elements, \"m,i;m,i\"");
    split_cmd->add_option("--partition", partition, "blocks, e.g. \"12|3\"");
    split_cmd->add_option("--subst", subst, "values separating the blocks");

    auto* ran_cmd = app.add_subcommand("ran-merge", "collide points along a partition");
    ran_cmd->add_option("--input", input, "series text file");
    ran_cmd->add_option("--basis", basis, "sum of plus basis elements, \"m,i;m,i\"");
    ran_cmd->add_option("--collision", collision, "classes, e.g. \"12|3\"");
    ran_cmd->add_option("--target-M", ran_M, "truncation of the result (0: same as input)");

    auto* axioms_cmd = app.add_subcommand("fact-axioms", "round trips, cocycle, mixed compatibility, Ran transitivity");
    axioms_cmd->add_flag("--no-mu", no_mu, "skip the field-level mu check");

    auto* self_cmd = app.add_subcommand("selftest", "acceptance criteria");
    self_cmd->add_option("--only", only, "comma separated criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Run run;
    try {
        if (*residue_cmd) run = cmd_residue(c, input, basis, subst);
        else if (*pairing_cmd) run = cmd_pairing_table(c);
        else if (*expand_cmd) run = cmd_expand_delta(c, k, side, print);
        else if (*cauchy_cmd) run = cmd_cauchy(c, max_pole);
        else if (*locality_cmd) run = cmd_locality(c, fields, max_k, expect);
        else if (*jacobi_cmd) run = cmd_jacobi(c, fields, pole, poles);
        else if (*unit_cmd) run = cmd_unit(c, *unit_cmd->get_option("--fields") ? fields : "beta,beta_d,beta_t");
        else if (*mu12_cmd) run = cmd_mu12(c, fields);
        else if (*gen_cmd) run = cmd_generate(c, gens, steps, probe_n, probe_m);
        else if (*split_cmd) run = cmd_fact_split(c, input, basis, partition, subst);
        else if (*ran_cmd) run = cmd_ran_merge(c, input, basis, collision, ran_M);
        else if (*axioms_cmd) run = cmd_fact_axioms(c, !no_mu);
        else if (*self_cmd) run = cmd_selftest(c, only);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Invalid) {
            std::cerr << "usage error: " << e.what() << "\n";
            return 2;
        }
        std::cerr << "error: " << e.what() << "\n";
        Report r;
        r.check = app.get_subcommands().front()->get_name();
        r.fail(e.what());
        run.command = r.check;
        run.reports = {r};
    }

    for (auto& [k, v] : run.values) {
        if (v.find('\n') != std::string::npos) std::cout << k << ":\n" << v << (v.back() == '\n' ? "" : "\n");
        else std::cout << k << ": " << v << "\n";
    }
    bool all = true;
    for (auto& r : run.reports) {
        all = all && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.check << "  (" << r.cases << " cases";
        if (r.window.size() > 0) std::cout << ", window " << r.window.str();
        if (r.K > 0) std::cout << ", K=" << r.K;
        std::cout << ")\n";
        for (auto& s : r.residuals) std::cout << "    residual: " << s << "\n";
    }
    if (!c.report.empty()) {
        std::ofstream out(c.report, std::ios::trunc);
        if (!out) {
            std::cerr << "cannot write " << c.report << "\n";
            return 2;
        }
        for (auto& r : run.reports) out << record(run.command, r, c).dump() << "\n";
    }
    return all ? 0 : 1;
}
