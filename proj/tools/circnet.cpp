#include "circnet/reconstruct.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace circnet;

struct RunConfig {
    std::string mode = "exact";
    double tol = 1e-9;
    std::string order = "search";
    std::size_t max_n = 10;
    std::string emit = "table";
    std::string kind = "M";
    std::string out;  // file prefix; empty means stdout
    std::string dot_path;
    bool check = false;

    Tolerance tolerance() const
    {
        Tolerance t;
        t.relative = tol;
        return t;
    }
    bool emit_dot() const { return emit == "dot" || emit == "all"; }
    bool emit_table() const { return emit == "table" || emit == "all"; }
};

// Gate failures exit with 10 + step; usage and parse errors with 2.
constexpr int exit_code(int step) { return 10 + step; }

std::optional<CircularOrder> parse_order(const std::string& text)
{
    if (text == "search") return std::nullopt;
    std::string s = text;
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream in(s);
    std::vector<int> labels;
    int x;
    while (in >> x) labels.push_back(x);
    if (!in.eof() || labels.empty()) throw ParseError("--order expects 'search' or a permutation like 1,2,3");
    return CircularOrder(labels);
}

void write_file(const std::string& path, const std::string& body)
{
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << body;
}

template <Scalar T>
std::string matrix_text(const Matrix<T>& m, bool labels = false)
{
    std::ostringstream s;
    write_matrix(s, m, labels);
    return s.str();
}

template <Scalar T>
int simulate(const RunConfig& cfg, const std::string& path)
{
    const auto net = read_network_file(path);
    const auto tol = cfg.tolerance();
    const auto m = response_matrix<T>(net, tol);
    const auto w = w_from_m(m, tol);
    const auto r = resistance_matrix<T>(net, tol);

    // matrices are written even when no split system exists
    if (cfg.out.empty()) {
        std::cout << "M\n" << matrix_text(m) << "W\n" << matrix_text(w) << "R\n" << matrix_text(r, true);
    } else {
        write_file(cfg.out + ".M.txt", matrix_text(m));
        write_file(cfg.out + ".W.txt", matrix_text(w));
        write_file(cfg.out + ".R.txt", matrix_text(r, true));
    }

    auto order = net.boundary_order();
    if (!is_kalmanson(w, order, tol).kalmanson) {
        const auto search = find_circular_order(w, tol, cfg.max_n);
        if (!search.order) {
            std::cerr << "error: resistance matrix has no Kalmanson order, no split system written\n";
            return exit_code(2);
        }
        order = *search.order;
    }
    const auto splits = split_decomposition(w, order, tol);
    std::ostringstream split_text;
    write_split_system(split_text, splits);

    if (cfg.check) {
        const auto back = split_metric(splits, w.labels());
        bool same = true;
        const double scale = w.max_abs();
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = 0; j < w.size(); ++j)
                same = same && ScalarOps<T>::equal(back(i, j), w(i, j), scale, tol);
        if (!same) {
            std::cerr << "check: split metric does not reproduce W\n";
            return exit_code(3);
        }
        std::cerr << "check: split metric reproduces W\n";
    }

    if (cfg.out.empty()) {
        std::cout << "SPLITS\n" << split_text.str();
        if (cfg.emit_table()) std::cout << split_table(splits);
        if (cfg.emit_dot()) std::cout << network_dot(net) << render_dot(splits, DotStyle::network);
    } else {
        write_file(cfg.out + ".splits.txt", split_text.str());
        if (cfg.emit_table()) write_file(cfg.out + ".table.txt", split_table(splits));
        if (cfg.emit_dot()) {
            write_file(cfg.out + ".network.dot", network_dot(net));
            write_file(cfg.out + ".splits.dot", render_dot(splits, DotStyle::network));
        }
    }
    return 0;
}

template <Scalar T>
int analyze(const RunConfig& cfg, const std::string& path)
{
    const auto input = read_matrix_file<T>(path);
    const auto tol = cfg.tolerance();
    std::ostream& out = std::cout;
    int failed = 0;
    auto note_failure = [&](int step) {
        if (!failed) failed = step;
    };

    Matrix<T> m, w;
    if (cfg.kind == "W") {
        const auto rr = validate_resistance(input, tol);
        if (!rr.valid()) {
            out << "validation: failed";
            for (const auto& f : rr.failures) out << "; " << f;
            out << "\n";
            return exit_code(1);
        }
        w = input;
        m = m_from_w(w, tol);
    } else {
        m = input;
    }
    const auto report = validate_response(m, tol);
    if (!report.valid()) {
        out << "validation: failed";
        for (const auto& f : report.failures) out << "; " << f;
        out << "\n";
        return exit_code(1);
    }
    out << "validation: ok" << (report.symmetrized ? " (symmetrized)" : "") << "\n";
    if (report.symmetrized) m = symmetrized(m);
    for (const auto& cp : report.cut_points) {
        out << "cut point " << cp.terminal << ":";
        for (const auto& comp : cp.components) {
            out << " {";
            for (std::size_t i = 0; i < comp.size(); ++i) out << (i ? "," : "") << comp[i];
            out << "}";
        }
        out << "\n";
    }
    if (cfg.kind != "W") w = w_from_m(m, tol);

    CircularOrder order;
    if (auto given = parse_order(cfg.order)) {
        order = *given;
        out << "order: " << order.to_string() << " (given)\n";
    } else {
        const auto search = find_circular_order(w, tol, cfg.max_n);
        if (!search.order) {
            out << "order: none found" << (search.exhaustive ? "" : " (heuristic search)") << "\n";
            out << "kalmanson: no\n";
            return exit_code(2);
        }
        order = *search.order;
        out << "order: " << order.to_string() << " (" << search.consistent_orders
            << (search.count_capped ? "+" : "") << " consistent)\n";
    }

    const auto kv = is_kalmanson(w, order, tol);
    if (kv.kalmanson) {
        out << "kalmanson: yes\n";
    } else {
        const auto& q = *kv.witness;
        out << "kalmanson: no, witness (" << q[0] << "," << q[1] << "," << q[2] << "," << q[3] << ")\n";
        note_failure(2);
    }

    if (order.size() <= 12) {
        const auto pv = is_circular_planar(m, order, tol);
        if (pv.planar) {
            out << "planarity: planar (" << pv.minors_checked << " minors)\n";
        } else {
            out << "planarity: non-planar, witness " << pv.witness->to_string() << " = "
                << ScalarOps<T>::format(*pv.witness_value) << "\n";
            note_failure(2);
        }
    } else {
        out << "planarity: not checked (n > 12)\n";
    }
    if (!kv.kalmanson) return exit_code(failed);

    const auto splits = split_decomposition(w, order, tol);
    out << "splits: " << splits.splits.size() << "\n";
    if (cfg.emit_table()) out << split_table(splits);
    const auto d = decompose(splits);
    out << "blobs: " << d.blobs.size() << "\n";
    const auto mo = reorder(m, order);
    for (auto c : d.bridge_candidates) {
        const auto& s = splits.splits[c];
        if (s.trivial(order.size())) continue;
        const auto check = verify_bridge(mo, order, s.part, tol);
        out << "bridge candidate " << split_to_string(s.part, order) << " weight " << ScalarOps<T>::format(s.weight)
            << ": " << (check.verified ? "verified" : "rejected");
        if (check.blocking) out << " by " << check.blocking->to_string();
        out << "\n";
    }
    const auto ob = one_nested_obstruction(splits, tol);
    if (ob) {
        out << "obstruction: not 1-nested; a=" << ScalarOps<T>::format(ob->weight_a)
            << " b=" << ScalarOps<T>::format(ob->weight_b) << "\n";
    } else {
        out << "obstruction: none found (no obstruction of the searched form)\n";
    }
    if (cfg.emit_dot()) out << render_dot(splits, DotStyle::network);
    return failed ? exit_code(failed) : 0;
}

template <Scalar T>
int reconstruct(const RunConfig& cfg, const std::string& path)
{
    const auto input = read_matrix_file<T>(path);
    PipelineOptions opt;
    opt.tol = cfg.tolerance();
    opt.order = parse_order(cfg.order);
    opt.max_n = cfg.max_n;
    opt.input_is_resistance = cfg.kind == "W";
    const auto result = reconstruct_pipeline(input, opt);
    if (!result.ok()) {
        const auto& f = *result.failure;
        std::cerr << "step " << f.step << " (" << f.gate << "): " << f.message;
        if (!f.witness.empty()) std::cerr << ", witness " << f.witness;
        std::cerr << "\n";
        return exit_code(f.step);
    }
    std::ostringstream plan;
    write_plan(plan, *result.plan);
    if (cfg.out.empty()) {
        std::cout << plan.str();
    } else {
        write_file(cfg.out, plan.str());
    }
    if (cfg.emit_dot()) {
        const auto dot = network_dot(result.plan->network, "reconstructed");
        if (cfg.dot_path.empty()) {
            std::cout << dot;
        } else {
            write_file(cfg.dot_path, dot);
        }
    }
    return 0;
}

int generate(std::size_t n, std::size_t interior, std::uint64_t seed, const std::string& out)
{
    const auto net = random_circular_planar(n, interior, seed);
    std::ostringstream s;
    write_network(s, net);
    if (out.empty()) {
        std::cout << s.str();
    } else {
        write_file(out, s.str());
    }
    return 0;
}

template <class F>
int dispatch(const RunConfig& cfg, F&& body)
{
    if (cfg.mode == "float") return body(double{});
    return body(Rational{});
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"circular planar network analysis and reconstruction"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--mode", cfg.mode, "exact or float arithmetic")->check(CLI::IsMember({"exact", "float"}));
        sub->add_option("--tol", cfg.tol, "relative tolerance (float mode)");
        sub->add_option("--max-n", cfg.max_n, "largest n for exhaustive order search");
        sub->add_option("--emit", cfg.emit, "dot, table or all")->check(CLI::IsMember({"dot", "table", "all"}));
    };

    std::string input;
    auto* sim = app.add_subcommand("simulate", "response, resistance and split system of a network file");
    sim->add_option("network", input, "network file")->required();
    sim->add_option("-o,--out", cfg.out, "write PREFIX.M.txt, PREFIX.W.txt, ... instead of stdout");
    sim->add_flag("--check", cfg.check, "verify the split metric reproduces W");
    add_common(sim);

    auto* ana = app.add_subcommand("analyze", "validation, order, Kalmanson, planarity and split report");
    ana->add_option("matrix", input, "matrix file")->required();
    ana->add_option("--kind", cfg.kind, "M (response) or W (resistance)")->check(CLI::IsMember({"M", "W"}));
    ana->add_option("--order", cfg.order, "'search' or a permutation such as 1,2,3,4");
    add_common(ana);

    auto* rec = app.add_subcommand("reconstruct", "full reconstruction plan and recovered graph");
    rec->add_option("matrix", input, "matrix file")->required();
    rec->add_option("--kind", cfg.kind, "M (response) or W (resistance)")->check(CLI::IsMember({"M", "W"}));
    rec->add_option("--order", cfg.order, "'search' or a permutation such as 1,2,3,4");
    rec->add_option("-o,--out", cfg.out, "plan output file");
    rec->add_option("--dot", cfg.dot_path, "DOT output file (with --emit dot|all)");
    add_common(rec);

    std::size_t n = 5, interior = 2;
    std::uint64_t seed = 1;
    auto* gen = app.add_subcommand("generate", "random circular planar network");
    gen->add_option("--terminals", n, "number of terminals")->check(CLI::Range(3, 64));
    gen->add_option("--interior", interior, "number of interior nodes");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("-o,--out", cfg.out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*gen) return generate(n, interior, seed, cfg.out);
        if (*sim)
            return dispatch(cfg, [&](auto tag) { return simulate<decltype(tag)>(cfg, input); });
        if (*ana)
            return dispatch(cfg, [&](auto tag) { return analyze<decltype(tag)>(cfg, input); });
        if (*rec)
            return dispatch(cfg, [&](auto tag) { return reconstruct<decltype(tag)>(cfg, input); });
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
