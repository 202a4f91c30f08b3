// Command-line front end: evaluate formulas on simplicial models, search for
// countermodels, decide definability consequence, check derivations, and
// reproduce the example corpus.
//
// Exit status: 0 on logical success (a value was computed, VALID, PROVEN,
// ACCEPTED, PASS), 1 on a logical negative (NOT VALID, countermodel found,
// REFUTED, REJECTED, FAIL), 2 on usage or I/O errors, 3 when the definability
// prover gives up without a verdict (UNKNOWN).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "se/calculus.hpp"
#include "se/complex.hpp"
#include "se/corpus.hpp"
#include "se/defcons.hpp"
#include "se/formula.hpp"
#include "se/search.hpp"
#include "se/semantics.hpp"

namespace {

using namespace se;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool machine = false;

void kv(const std::string& key, const std::string& value) {
    std::cout << key << '=' << value << '\n';
}

int env_int(const char* name, int fallback) {
    const char* s = std::getenv(name);
    if (!s || !*s) return fallback;
    try {
        return std::stoi(s);
    } catch (const std::exception&) {
        throw UsageError(std::string(name) + " is not an integer: " + s);
    }
}

// A model argument is either a file path or a corpus name; files win.
Complex load_model(const std::string& spec) {
    std::ifstream in(spec);
    if (in) {
        std::stringstream buf;
        buf << in.rdbuf();
        std::vector<std::string> warnings;
        Complex c = parse_model(buf.str(), &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << spec << ": " << w << '\n';
        return c;
    }
    return corpus_build(spec).model;
}

// "@label" resolves a landmark; otherwise a comma-separated vertex list.
FaceId resolve_face(const Complex& m, const std::string& spec) {
    if (!spec.empty() && spec[0] == '@') return m.landmark(spec.substr(1));
    std::vector<VertexId> ids;
    std::stringstream ss(spec);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name.empty()) continue;
        VertexId v = m.vertex_id(name);
        if (v < 0) throw UsageError("unknown vertex: " + name);
        ids.push_back(v);
    }
    if (ids.empty()) throw UsageError("empty face spec: " + spec);
    FaceId f = m.find_face(ids);
    if (f < 0) throw UsageError("vertices do not form a face: " + spec);
    return f;
}

std::vector<Formula> parse_list(const std::string& joined) {
    std::vector<Formula> out;
    std::stringstream ss(joined);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(parse(part));
    }
    return out;
}

void print_model(const Complex& m, const std::string& key) {
    std::istringstream lines(write_model(m));
    std::string line;
    while (std::getline(lines, line)) {
        if (machine)
            kv(key, line);
        else
            std::cout << line << '\n';
    }
}

int run_eval(const std::string& model, const std::string& face, const std::string& formula) {
    Complex m = load_model(model);
    FaceId x = resolve_face(m, face);
    TruthValue3 v = eval3(m, x, parse(formula));
    if (machine)
        kv("value", std::string(1, truth_char(v)));
    else
        std::cout << truth_char(v) << '\n';
    return 0;
}

int run_valid(const std::string& model, const std::string& formula, bool facets_only) {
    Complex m = load_model(model);
    Formula f = parse(formula);
    std::optional<FaceId> bad = facets_only ? falsifying_facet(m, f) : falsifying_face(m, f);
    if (machine) {
        kv("valid", bad ? "no" : "yes");
        if (bad) kv("face", m.face_name(*bad));
    } else if (bad) {
        std::cout << "NOT VALID at " << m.face_name(*bad) << '\n';
    } else {
        std::cout << "VALID\n";
    }
    return bad ? 1 : 0;
}

int run_countermodel(const std::string& formula, const std::string& agents_csv, int max_verts,
                     int vars, int max_facets, bool dedup, std::uint64_t max_models) {
    Bounds b;
    b.agents.clear();
    std::stringstream ss(agents_csv);
    std::string a;
    while (std::getline(ss, a, ','))
        if (!a.empty()) b.agents.push_back(a);
    if (b.agents.empty()) throw UsageError("no agents given");
    b.max_vertices_per_agent = max_verts;
    b.vars_per_agent = vars;
    b.max_facets = max_facets;
    b.dedup_isomorphic = dedup;
    b.max_models = max_models;
    std::optional<Witness> w = find_countermodel(parse(formula), b);
    if (machine) {
        kv("found", w ? "yes" : "no");
        kv("models", std::to_string(w ? w->models_checked : count_models(b)));
        if (w) {
            kv("face", w->model.face_name(w->face));
            print_model(w->model, "model");
        }
    } else if (w) {
        std::cout << "COUNTERMODEL after " << w->models_checked << " models\n";
        std::cout << "falsifying face: " << w->model.face_name(w->face) << '\n';
        print_model(w->model, "model");
    } else {
        std::cout << "NONE (" << count_models(b) << " models checked)\n";
    }
    return w ? 1 : 0;
}

int run_defcons(const std::string& gamma_s, const std::string& psi_s, int vertex_bound,
                int prover_steps) {
    std::vector<Formula> gamma = parse_list(gamma_s);
    Formula psi = parse(psi_s);
    DefConsOptions opts;
    opts.refuter_vertex_bound = vertex_bound;
    opts.prover_budget = prover_steps;
    DefConsResult r = check_defcons(gamma, psi, opts);
    const char* status = r.status == DefConsStatus::Proven    ? "PROVEN"
                         : r.status == DefConsStatus::Refuted ? "REFUTED"
                                                              : "UNKNOWN";
    if (machine) {
        kv("status", status);
        kv("prover_steps", std::to_string(r.prover_steps));
        kv("models_checked", std::to_string(r.models_checked));
        if (!r.note.empty()) kv("note", r.note);
        if (r.witness) {
            kv("face", r.witness->model.face_name(r.witness->face));
            print_model(r.witness->model, "model");
        }
    } else {
        std::cout << status << '\n';
        if (!r.note.empty()) std::cout << r.note << '\n';
        if (r.witness) {
            std::cout << "everything defined, goal undefined at "
                      << r.witness->model.face_name(r.witness->face) << " of\n";
            print_model(r.witness->model, "model");
        }
    }
    return r.status == DefConsStatus::Proven    ? 0
           : r.status == DefConsStatus::Refuted ? 1
                                                : 3;
}

int run_check(const std::string& path, bool strict, const std::vector<std::string>& hyp_s,
              const std::string& conclusion_s, bool inconsistency, int vertex_bound,
              int prover_steps) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read derivation file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    Derivation d = parse_derivation(buf.str());
    CheckOptions opts;
    opts.require_proven_provisos = strict;
    opts.defcons.refuter_vertex_bound = vertex_bound;
    opts.defcons.prover_budget = prover_steps;
    std::vector<Formula> gamma;
    for (const auto& h : hyp_s) gamma.push_back(parse(h));
    CheckReport r;
    bool verdict;
    if (inconsistency) {
        if (gamma.empty()) throw UsageError("--inconsistency needs at least one --hyp");
        verdict = check_inconsistency_witness(gamma, d, opts, &r);
    } else if (!gamma.empty()) {
        Formula phi = conclusion_s.empty() ? d.conclusion() : parse(conclusion_s);
        r = check_hypothesis_derivation(gamma, phi, d, opts);
        verdict = r.accepted;
    } else {
        r = check_derivation(d, opts);
        verdict = r.accepted;
    }
    if (machine) {
        kv("accepted", r.accepted ? "yes" : "no");
        if (inconsistency) kv("inconsistency", verdict ? "yes" : "no");
        if (!r.accepted) {
            kv("reject_line", std::to_string(r.reject_line));
            kv("reason", r.reason);
        }
        for (const auto& p : r.provisos) {
            const char* st = p.state == ProvisoState::Proven    ? "proven"
                             : p.state == ProvisoState::Assumed ? "assumed"
                                                                : "failed";
            kv("proviso", std::to_string(p.line) + "|" + st + "|" + p.obligation);
        }
    } else {
        std::cout << report_summary(r) << '\n';
        if (inconsistency)
            std::cout << (verdict ? "hypotheses witnessed inconsistent\n"
                                  : "no inconsistency witnessed\n");
    }
    return verdict ? 0 : 1;
}

int run_demo(const std::string& name, bool all, int bound) {
    std::vector<std::string> names = all ? demo_names() : std::vector<std::string>{name};
    bool ok = true;
    for (const auto& n : names) {
        DemoReport r = ::se::run_demo(n, bound);
        if (machine) {
            int passed = 0;
            for (const auto& c : r.checks)
                if (c.pass) ++passed;
            kv("demo", r.name);
            kv("checks", std::to_string(r.checks.size()));
            kv("passed", std::to_string(passed));
            kv("pass", r.pass() ? "yes" : "no");
        } else {
            std::cout << format_demo(r) << '\n';
        }
        ok = ok && r.pass();
    }
    return ok ? 0 : 1;
}

int run_corpus_list() {
    for (const auto& n : corpus_names()) {
        if (machine)
            kv("name", n);
        else
            std::cout << n << '\n';
    }
    return 0;
}

int run_corpus_export(const std::string& name, const std::string& out_path,
                      const std::string& val) {
    auto make = [&]() -> NamedModel {
        if (name == "xmas" && !val.empty()) {
            if (val.size() != 3 || val.find_first_not_of("01") != std::string::npos)
                throw UsageError("--val wants three bits, e.g. 010");
            return build_xmas(val[0] == '1', val[1] == '1', val[2] == '1');
        }
        return corpus_build(name);
    };
    NamedModel nm = make();
    std::string text = write_model(nm.model);
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) throw UsageError("cannot write: " + out_path);
    out << text;
    if (!machine) std::cout << "wrote " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-valued epistemic logic on impure simplicial models"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "plain";
    app.add_option("--format", format, "plain or machine (key=value lines)")
        ->check(CLI::IsMember({"plain", "machine"}))
        ->capture_default_str();

    int rc = 0;
    int vertex_bound = env_int("SE_VERTEX_BOUND", 2);
    int prover_steps = env_int("SE_PROVER_STEPS", 10000);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "truth value of a formula at one face");
    std::string e_model, e_face, e_formula;
    eval_cmd->add_option("-m,--model", e_model, "model file or corpus name")->required();
    eval_cmd->add_option("-X,--face", e_face, "comma-separated vertices, or @landmark")
        ->required();
    eval_cmd->add_option("-f,--formula", e_formula)->required();
    eval_cmd->callback([&] {
        machine = format == "machine";
        rc = run_eval(e_model, e_face, e_formula);
    });

    // valid
    auto* valid_cmd = app.add_subcommand("valid", "is the formula never false in the model");
    std::string v_model, v_formula;
    bool v_facets = false;
    valid_cmd->add_option("-m,--model", v_model)->required();
    valid_cmd->add_option("-f,--formula", v_formula)->required();
    valid_cmd->add_flag("--facets-only", v_facets, "scan facets instead of all faces");
    valid_cmd->callback([&] {
        machine = format == "machine";
        rc = run_valid(v_model, v_formula, v_facets);
    });

    // countermodel
    auto* cm_cmd = app.add_subcommand("countermodel", "search enumerated models for a face "
                                                      "falsifying the formula");
    std::string c_formula, c_agents = "a,b";
    int c_verts = 2, c_vars = 1, c_facets = 0;
    bool c_dedup = false;
    std::uint64_t c_maxmodels = 0;
    cm_cmd->add_option("-f,--formula", c_formula)->required();
    cm_cmd->add_option("--agents", c_agents, "comma-separated agent names")
        ->capture_default_str();
    cm_cmd->add_option("--max-verts", c_verts, "vertices per agent")->capture_default_str();
    cm_cmd->add_option("--vars", c_vars, "variables per agent")->capture_default_str();
    cm_cmd->add_option("--max-facets", c_facets, "0 = unbounded")->capture_default_str();
    cm_cmd->add_flag("--dedup", c_dedup, "skip isomorphic duplicates");
    cm_cmd->add_option("--max-models", c_maxmodels, "stop after this many models, 0 = all")
        ->capture_default_str();
    cm_cmd->callback([&] {
        machine = format == "machine";
        rc = run_countermodel(c_formula, c_agents, c_verts, c_vars, c_facets, c_dedup,
                              c_maxmodels);
    });

    // defcons
    auto* dc_cmd = app.add_subcommand("defcons", "definability consequence: gamma |> psi");
    std::string d_gamma, d_psi;
    dc_cmd->add_option("--gamma", d_gamma, "semicolon-separated formulas, may be empty")
        ->required();
    dc_cmd->add_option("--psi", d_psi)->required();
    dc_cmd->add_option("--vertex-bound", vertex_bound, "refuter vertices per agent")
        ->capture_default_str();
    dc_cmd->add_option("--prover-steps", prover_steps)->capture_default_str();
    dc_cmd->callback([&] {
        machine = format == "machine";
        rc = run_defcons(d_gamma, d_psi, vertex_bound, prover_steps);
    });

    // check
    auto* ck_cmd = app.add_subcommand("check", "verify a derivation file");
    std::string k_path, k_conclusion;
    std::vector<std::string> k_hyps;
    bool k_strict = false, k_incons = false;
    ck_cmd->add_option("file", k_path, "derivation file")->required();
    ck_cmd->add_flag("--require-proven-provisos", k_strict,
                     "reject when a proviso is merely assumed");
    ck_cmd->add_option("--hyp", k_hyps, "hypothesis formula (repeatable)");
    ck_cmd->add_option("--conclusion", k_conclusion,
                       "expected conclusion (with --hyp; defaults to the last line)");
    ck_cmd->add_flag("--inconsistency", k_incons,
                     "expect a refutation of the --hyp set instead of a conclusion");
    ck_cmd->add_option("--vertex-bound", vertex_bound)->capture_default_str();
    ck_cmd->add_option("--prover-steps", prover_steps)->capture_default_str();
    ck_cmd->callback([&] {
        machine = format == "machine";
        rc = run_check(k_path, k_strict, k_hyps, k_conclusion, k_incons, vertex_bound,
                       prover_steps);
    });

    // demo
    auto* demo_cmd = app.add_subcommand("demo", "run a self-checking reproduction");
    std::string m_name;
    bool m_all = false;
    int m_bound = 5;
    demo_cmd->add_option("name", m_name, "one of the demo names");
    demo_cmd->add_flag("--all", m_all, "run every demo");
    demo_cmd->add_option("--bound", m_bound, "formula size cap for fragment demos")
        ->capture_default_str();
    demo_cmd->callback([&] {
        machine = format == "machine";
        if (!m_all && m_name.empty()) throw UsageError("demo needs a name or --all");
        rc = run_demo(m_name, m_all, m_bound);
    });

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "list or export the example models");
    corpus_cmd->require_subcommand(1);
    auto* list_cmd = corpus_cmd->add_subcommand("list", "print corpus model names");
    list_cmd->callback([&] {
        machine = format == "machine";
        rc = run_corpus_list();
    });
    auto* exp_cmd = corpus_cmd->add_subcommand("export", "write a corpus model as text");
    std::string x_name, x_out, x_val;
    exp_cmd->add_option("name", x_name)->required();
    exp_cmd->add_option("-o,--output", x_out, "output file (default stdout)");
    exp_cmd->add_option("--val", x_val, "xmas only: three bits for p_a p_b p_c");
    exp_cmd->callback([&] {
        machine = format == "machine";
        rc = run_corpus_export(x_name, x_out, x_val);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
