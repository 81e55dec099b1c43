#include "dichotomy/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "dichotomy/extension.hpp"
#include "dichotomy/finitetime.hpp"
#include "dichotomy/json_io.hpp"
#include "dichotomy/roughness.hpp"
#include "dichotomy/spectral.hpp"
#include "dichotomy/surgery.hpp"

namespace dichotomy::cli {

namespace {

struct WindowArg {
    long long lo = 0, hi = 0;
};

WindowArg parse_window(const std::string& s) {
    const auto colon = s.find(':');
    require(colon != std::string::npos, ErrorCode::InvalidInput,
            "window '" + s + "' must look like lo:hi");
    WindowArg w;
    try {
        w.lo = std::stoll(s.substr(0, colon));
        w.hi = std::stoll(s.substr(colon + 1));
    } catch (const std::exception&) {
        throw DichotomyError(ErrorCode::InvalidInput, "window '" + s + "' must look like lo:hi");
    }
    require(w.lo <= w.hi, ErrorCode::InvalidInput, "window '" + s + "' has lo > hi");
    return w;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::IndexOutsideInterval:
            return 2;
        default:
            return 1;  // mathematical obstruction: a well-formed negative verdict
    }
}

// Common per-command inputs: a fixture or a problem file, plus constants.
struct InputSpec {
    std::string fixture;
    std::string problem_path;
    double l_flag = 0.0, m_flag = 0.0, k_flag = 0.0, alpha_flag = 0.0;
    ToleranceConfig tol;

    SequencePtr seq;
    std::optional<ProjectionFamily> family;
    std::optional<Form> constants;
    bool family_estimated = false;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--fixture", fixture, "named fixture (see `fixtures`)");
        cmd->add_option("--problem", problem_path, "problem JSON file");
        cmd->add_option("--L", l_flag, "Form A constant L");
        cmd->add_option("--M", m_flag, "Form B projection bound M");
        cmd->add_option("--K", k_flag, "Form B constant K");
        cmd->add_option("--alpha", alpha_flag, "exponent alpha (natural log scale)");
    }

    void resolve() {
        require(fixture.empty() != problem_path.empty(), ErrorCode::InvalidInput,
                "give exactly one of --fixture or --problem");
        if (const char* env = std::getenv("DICHOTOMY_TOL")) {
            try {
                tol.tol_residual = std::stod(env);
            } catch (const std::exception&) {
                throw DichotomyError(ErrorCode::InvalidInput,
                                     "DICHOTOMY_TOL must be a number");
            }
            tol.validate();
        }
        if (!fixture.empty()) {
            const NamedFixture& fx = dichotomy::fixture(fixture);
            seq = fx.sequence;
            family = ProjectionFamily::constant(fx.sequence->interval(), *fx.known_projection);
            constants = Form::formA(1.0, fx.alpha);
        } else {
            std::ifstream in(problem_path);
            require(in.good(), ErrorCode::InvalidInput, "cannot open " + problem_path);
            Json j;
            try {
                in >> j;
            } catch (const std::exception& e) {
                throw DichotomyError(ErrorCode::InvalidInput,
                                     problem_path + ": " + std::string(e.what()));
            }
            ProblemFile pf = parse_problem(j);
            seq = pf.seq;
            family = pf.family;
            constants = pf.constants;
            tol = pf.tol;
        }
        // explicit flags override stored constants
        if (alpha_flag > 0.0) {
            if (m_flag > 0.0 || k_flag > 0.0)
                constants = Form::formB(m_flag > 0 ? m_flag : 1.0, k_flag > 0 ? k_flag : 1.0,
                                        alpha_flag);
            else
                constants = Form::formA(l_flag > 0 ? l_flag : 1.0, alpha_flag);
        } else if (l_flag > 0.0 && constants) {
            constants = Form::formA(l_flag, constants->alpha);
        }
    }

    // A certificate on the given finite window; estimates the family from
    // the window data when none is known.
    DichotomyCertificate certificate(const WindowArg& w) {
        if (!family) {
            AnchoredFamily af = estimate_window_family(*seq, w.lo, w.hi, 1e-3, tol);
            family = af.family;
            family_estimated = true;
        }
        ProjectionFamily fam = family->interval().kind == Interval::Kind::Finite
                                   ? *family
                                   : family->restricted_to(Interval::finite(w.lo, w.hi));
        Form form = constants ? *constants : Form::formA(1.0, std::log(2.0));
        return DichotomyCertificate{seq, std::move(fam), form, Interval::finite(w.lo, w.hi), {}};
    }
};

Json base_report(const std::vector<std::string>& args) {
    std::string echo;
    for (const auto& a : args) {
        if (!echo.empty()) echo += ' ';
        echo += a;
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = echo;
    return j;
}

double fitted_log_slope(const std::vector<double>& values) {
    // least-squares slope of log(values[k]) vs k over the strictly positive entries
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t k = 0; k < values.size(); ++k) {
        if (!(values[k] > 0.0)) continue;
        const double x = static_cast<double>(k), y = std::log(values[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.0;
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Json surgery_to_json(const SurgeryResult& res) {
    return Json{{"guaranteed", form_to_json(res.guaranteed)},
                {"measured", form_to_json(res.certificate.form)},
                {"gap_angle", res.gap_angle}};
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& args) {
    Json report = base_report(args);
    CLI::App app{"exponential dichotomy toolkit for noninvertible linear difference equations"};
    app.require_subcommand(1);
    app.footer(
        "Exponents use the natural-log convention e^{-alpha(k-m)}. Windows are lo:hi "
        "(inclusive). Subspaces are JSON lists of basis columns, e.g. [[1,1]] for span{(1,1)}. "
        "DICHOTOMY_TOL overrides tol_residual.");

    InputSpec in;
    std::string window_s, window2_s, report_s, scan_s, out_path, side_s = "plus", wcols_s, to_form_s = "A";
    long long m_point = std::numeric_limits<long long>::min();
    long long to_point = 0, big_n = 10, ell = 1, base_step = 1;
    double delta = 0.0, kbar = 5.0, beta_bar = 0.5, l_cap = 1e6;
    std::uint64_t seed = 1;
    bool roundtrip = false, ode = false, serial = false;
    std::optional<double> alpha_opt;

    auto* c_fixtures = app.add_subcommand("fixtures", "list the named fixtures");
    (void)c_fixtures;

    auto* c_verify = app.add_subcommand("verify", "check certificate inequalities on a window");
    in.add_flags(c_verify);
    c_verify->add_option("--window", window_s, "verification window lo:hi")->required();

    auto* c_estimate = app.add_subcommand("estimate", "fit dichotomy constants on a window");
    in.add_flags(c_estimate);
    c_estimate->add_option("--window", window_s, "window lo:hi")->required();
    c_estimate->add_option("--l-cap", l_cap, "cap on L when fitting alpha");

    auto* c_convert = app.add_subcommand("convert", "convert constants between the two forms");
    in.add_flags(c_convert);
    c_convert->add_option("--to", to_form_s, "target form: A or B");
    c_convert->add_flag("--roundtrip", roundtrip, "convert there and back, reporting inflation");

    auto* c_project = app.add_subcommand("project", "change the free complement of a certificate");
    in.add_flags(c_project);
    c_project->add_option("--window", window_s, "certificate window lo:hi")->required();
    c_project->add_option("--complement", wcols_s, "new complement W as JSON columns")->required();
    c_project->add_option("--side", side_s, "plus (move nullspaces) or minus (move ranges)");

    auto* c_rebase = app.add_subcommand("rebase", "re-assign the complement at an interior point");
    in.add_flags(c_rebase);
    c_rebase->add_option("--window", window_s, "certificate window lo:hi")->required();
    c_rebase->add_option("--m", m_point, "interior base point")->required();
    c_rebase->add_option("--w", wcols_s, "subspace W at m as JSON columns")->required();
    c_rebase->add_option("--side", side_s, "plus or minus");

    auto* c_glue = app.add_subcommand("glue", "glue half-line certificates at a shared endpoint");
    in.add_flags(c_glue);
    c_glue->add_option("--window-minus", window2_s, "left window lo:0")->required();
    c_glue->add_option("--window-plus", window_s, "right window 0:hi")->required();

    auto* c_extend = app.add_subcommand("extend", "extend a dichotomy toward index 0");
    in.add_flags(c_extend);
    c_extend->add_option("--m", m_point, "current window endpoint nearest 0 (default +-1)");
    c_extend->add_option("--to", to_point, "target index (default 0)");
    c_extend->add_option("--window", window_s, "certificate window lo:hi (default 40 steps)");
    bool to_zero = false;
    c_extend->add_flag("--to-zero", to_zero, "extend to index 0 (default)");

    auto* c_embed = app.add_subcommand("embed", "embed an interval dichotomy into Z");
    in.add_flags(c_embed);
    c_embed->add_option("--window", window_s, "interval to restrict the certificate to")->required();
    c_embed->add_option("--verify-window", window2_s, "window to re-verify on")->required();

    auto* c_perturb = app.add_subcommand("perturb", "multiplicative roughness experiment");
    in.add_flags(c_perturb);
    std::string bfile;
    c_perturb->add_option("--delta", delta, "perturbation size |B(k)| = delta");
    c_perturb->add_option("--seed", seed, "seed for the perturbation");
    c_perturb->add_option("--bfile", bfile,
                          "explicit B matrices as JSON {\"k\": [[...]], ...} (overrides --delta)");
    c_perturb->add_option("--window", window_s, "perturbation window lo:hi")->required();
    c_perturb->add_option("--report", report_s, "report region lo:hi (default: window shrunk)");

    auto* c_constants = app.add_subcommand("constants", "evaluate roughness constant formulas");
    c_constants->add_option("--K", in.k_flag, "unperturbed constant K")->required();
    c_constants->add_option("--alpha", in.alpha_flag, "unperturbed exponent")->required();
    c_constants->add_option("--delta", delta, "perturbation bound")->required();
    c_constants->add_flag("--ode", ode, "continuous-time analog formulas");

    auto* c_ft = app.add_subcommand("finite-time", "finite-window dichotomy hypotheses check");
    in.add_flags(c_ft);
    c_ft->add_option("--N", big_n, "window length N")->required();
    c_ft->add_option("--ell", ell, "relative density gap");
    c_ft->add_option("--Kbar", kbar, "target whole-range constant");
    c_ft->add_option("--beta-bar", beta_bar, "target whole-range exponent");
    c_ft->add_option("--scan", scan_s, "scan range lo:hi")->required();
    c_ft->add_option("--base-step", base_step, "stride between base points");

    for (auto* cmd : {c_verify, c_estimate, c_project, c_rebase, c_glue, c_extend, c_embed,
                      c_perturb, c_ft})
        cmd->add_flag("--serial", serial, "run sweep kernels on the serial reference path");
    app.add_option("--out", out_path, "write the report to this path instead of stdout");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        CommandResult r;
        r.exit_code = 0;
        r.report = app.help();
        return r;
    } catch (const CLI::ParseError& e) {
        report["verdict"] = "error";
        report["error"] = Json{{"code", "UsageError"}, {"message", e.what()}};
        return {2, report.dump(2)};
    }

    const ExecutionMode mode = serial ? ExecutionMode::Serial : default_execution_mode();
    auto finish = [&](int code) {
        CommandResult r{code, report.dump(2), false};
        if (!out_path.empty()) {
            std::ofstream f(out_path);
            f << r.report << '\n';
            r.wrote_file = f.good();
        }
        return r;
    };

    try {
        if (app.got_subcommand(c_fixtures)) {
            Json list = Json::array();
            for (const auto& fx : fixture_registry())
                list.push_back(Json{{"label", fx.label},
                                    {"n", fx.sequence->dim()},
                                    {"interval", interval_to_json(fx.sequence->interval())},
                                    {"description", fx.description},
                                    {"known_projection", matrix_to_json(*fx.known_projection)},
                                    {"rank", fx.known_rank},
                                    {"alpha", fx.alpha}});
            report["fixtures"] = std::move(list);
            report["verdict"] = "pass";
        } else if (app.got_subcommand(c_verify)) {
            in.resolve();
            WindowArg w = parse_window(window_s);
            DichotomyCertificate cert = in.certificate(w);
            auto inv = check_invariance(*in.seq, cert.family, w.lo, w.hi, in.tol);
            VerifyReport rep = verify_certificate(cert, w.lo, w.hi, in.tol, mode);
            report["tolerances"] = tolerances_to_json(in.tol);
            report["family_estimated"] = in.family_estimated;
            report["invariance_residual"] = judged(inv.max_residual, in.tol.tol_residual);
            report["verify"] = verify_report_to_json(rep);
            report["verdict"] = rep.pass && inv.pass ? "pass" : "fail";
            return finish(rep.pass && inv.pass ? 0 : 1);
        } else if (app.got_subcommand(c_estimate)) {
            in.resolve();
            WindowArg w = parse_window(window_s);
            DichotomyCertificate cert = in.certificate(w);
            EstimateOptions opts;
            if (in.alpha_flag > 0.0) opts.alpha = in.alpha_flag;
            opts.l_cap = l_cap;
            opts.mode = mode;
            EstimateResult res = estimate_constants(in.seq, cert.family, w.lo, w.hi, opts, in.tol);
            report["tolerances"] = tolerances_to_json(in.tol);
            report["family_estimated"] = in.family_estimated;
            report["fitted"] = form_to_json(res.certificate.form);
            report["l_forward"] = res.l_forward;
            report["l_backward"] = res.l_backward;
            report["l_cap"] = l_cap;
            report["verdict"] = "pass";
        } else if (app.got_subcommand(c_convert)) {
            if (in.fixture.empty() && in.problem_path.empty()) in.fixture = "S1";
            in.resolve();
            require(in.constants.has_value(), ErrorCode::InvalidInput,
                    "convert: no constants given (use --L/--alpha or --M/--K/--alpha)");
            Form::Kind target = to_form_s == "B" ? Form::Kind::B : Form::Kind::A;
            DichotomyCertificate cert{in.seq,
                                      in.family ? *in.family
                                                : ProjectionFamily::constant(in.seq->interval(),
                                                                             Matrix::Identity(
                                                                                 in.seq->dim(),
                                                                                 in.seq->dim())),
                                      *in.constants, Interval::finite(0, 0), {}};
            ConversionResult res = convert_certificate(cert, target);
            report["input"] = form_to_json(*in.constants);
            report["output"] = form_to_json(res.certificate.form);
            if (roundtrip) {
                ConversionResult back =
                    convert_certificate(res.certificate, in.constants->kind);
                report["roundtrip"] = form_to_json(back.certificate.form);
                report["roundtrip_inflation"] = back.roundtrip_inflation;
            }
            report["verdict"] = "pass";
        } else if (app.got_subcommand(c_project)) {
            in.resolve();
            WindowArg w = parse_window(window_s);
            DichotomyCertificate cert = in.certificate(w);
            Subspace sub = subspace_from_columns(Json::parse(wcols_s), cert.dim(), in.tol);
            SurgeryResult res = side_s == "minus" ? change_complement_minus(cert, sub, in.tol)
                                                  : change_complement_plus(cert, sub, in.tol);
            std::vector<double> qp;
            for (long long k = w.lo; k <= w.hi; ++k)
                qp.push_back(spectral_norm(res.certificate.family.at(k) - cert.family.at(k)));
            report["tolerances"] = tolerances_to_json(in.tol);
            report["surgery"] = surgery_to_json(res);
            report["w_basis"] = matrix_to_json(sub.basis());
            report["base_projection"] =
                matrix_to_json(res.certificate.family.at(side_s == "minus" ? w.hi : w.lo));
            report["qp_distance"] = qp;
            report["qp_log_slope"] = fitted_log_slope(qp);
            report["verdict"] = "pass";
        } else if (app.got_subcommand(c_rebase)) {
            in.resolve();
            WindowArg w = parse_window(window_s);
            DichotomyCertificate cert = in.certificate(w);
            Subspace sub = subspace_from_columns(Json::parse(wcols_s), cert.dim(), in.tol);
            Side side = side_s == "minus" ? Side::Minus : Side::Plus;
            SurgeryResult res = rebase_at_m(cert, m_point, sub, side, in.tol);
            report["tolerances"] = tolerances_to_json(in.tol);
            report["surgery"] = surgery_to_json(res);
            report["w_basis"] = matrix_to_json(sub.basis());
            const Matrix& qm = res.certificate.family.at(m_point);
            report["achieved_at_m"] =
                Json{{"m", m_point},
                     {"range_gap", subspace_distance(projection_range(qm, in.tol),
                                                     side == Side::Plus
                                                         ? projection_range(cert.family.at(m_point), in.tol)
                                                         : sub)},
                     {"nullspace_gap",
                      subspace_distance(projection_nullspace(qm, in.tol),
                                        side == Side::Plus
                                            ? sub
                                            : projection_nullspace(cert.family.at(m_point), in.tol))}};
            report["verdict"] = "pass";
        } else if (app.got_subcommand(c_glue)) {
            in.resolve();
            WindowArg wp = parse_window(window_s);
            WindowArg wm = parse_window(window2_s);
            DichotomyCertificate cp = in.certificate(wp);
            DichotomyCertificate cm = in.certificate(wm);
            SurgeryResult res = glue_half_lines(cp, cm, in.tol);
            VerifyReport vr = verify_certificate(res.certificate, wm.lo, wp.hi, in.tol, mode);
            report["tolerances"] = tolerances_to_json(in.tol);
            report["surgery"] = surgery_to_json(res);
            report["seam_projection"] = matrix_to_json(res.certificate.family.at(wm.hi));
            report["verify"] = verify_report_to_json(vr);
            report["verdict"] = vr.pass ? "pass" : "fail";
            return finish(vr.pass ? 0 : 1);
        } else if (app.got_subcommand(c_extend)) {
            in.resolve();
            const bool minus_side = in.seq->interval().kind == Interval::Kind::HalfMinus;
            if (m_point == std::numeric_limits<long long>::min()) m_point = minus_side ? -1 : 1;
            WindowArg w = window_s.empty()
                              ? (minus_side ? WindowArg{m_point - 40, m_point}
                                            : WindowArg{m_point, m_point + 40})
                              : parse_window(window_s);
            DichotomyCertificate cert = in.certificate(w);
            ExtensionVerdict verdict = minus_side ? can_extend_minus(cert, m_point, to_point, in.tol)
                                                  : can_extend_plus(cert, m_point, to_point, in.tol);
            report["tolerances"] = tolerances_to_json(in.tol);
            Json vj{{"extendable", verdict.extendable},
                    {"required_rank", verdict.required_rank},
                    {"projection_preserved", verdict.projection_preserved}};
            if (verdict.preimage_dim >= 0) vj["preimage_dim"] = verdict.preimage_dim;
            if (verdict.obstruction) vj["obstruction"] = error_code_name(*verdict.obstruction);
            report["verdict_detail"] = std::move(vj);
            if (!verdict.extendable) {
                report["verdict"] = "fail";
                return finish(1);
            }
            ExtensionResult res = minus_side ? extend_minus(cert, to_point, in.tol)
                                             : extend_plus(cert, to_point, in.tol);
            VerifyReport vr = verify_certificate(
                res.certificate, res.certificate.verified_window.a,
                res.certificate.verified_window.b, in.tol, mode);
            report["guaranteed"] = form_to_json(res.guaranteed);
            report["measured"] = form_to_json(res.certificate.form);
            report["projection_at_target"] = matrix_to_json(res.certificate.family.at(to_point));
            if (!res.rechosen_at.empty()) report["rechosen_at"] = res.rechosen_at;
            report["verify"] = verify_report_to_json(vr);
            report["verdict"] = vr.pass ? "pass" : "fail";
            return finish(vr.pass ? 0 : 1);
        } else if (app.got_subcommand(c_embed)) {
            in.resolve();
            WindowArg w = parse_window(window_s);
            WindowArg vw = parse_window(window2_s);
            DichotomyCertificate cert = in.certificate(w);
            // restrict the family to the finite interval before embedding
            DichotomyCertificate finite_cert{
                in.seq, cert.family.restricted_to(Interval::finite(w.lo, w.hi)), cert.form,
                Interval::finite(w.lo, w.hi), {}};
            EmbedResult res = embed_in_Z(finite_cert, in.tol);
            VerifyReport vr = verify_certificate(res.certificate, vw.lo, vw.hi, in.tol, mode);
            const Matrix& pa = finite_cert.family.at(w.lo);
            const Matrix& pb = finite_cert.family.at(w.hi);
            report["tolerances"] = tolerances_to_json(in.tol);
            report["left_matrix"] = matrix_to_json(res.left_matrix);
            report["right_matrix"] = matrix_to_json(res.right_matrix);
            report["commute_residuals"] =
                Json{{"left", spectral_norm(res.left_matrix * pa - pa * res.left_matrix)},
                     {"right", spectral_norm(res.right_matrix * pb - pb * res.right_matrix)}};
            report["constants"] = form_to_json(res.certificate.form);
            report["verify"] = verify_report_to_json(vr);
            report["verdict"] = vr.pass ? "pass" : "fail";
            return finish(vr.pass ? 0 : 1);
        } else if (app.got_subcommand(c_perturb)) {
            in.resolve();
            WindowArg w = parse_window(window_s);
            WindowArg rw = report_s.empty()
                               ? WindowArg{w.lo + (w.hi - w.lo) / 5, w.hi - (w.hi - w.lo) / 5}
                               : parse_window(report_s);
            DichotomyCertificate cert = in.certificate(w);
            std::map<long long, Matrix> b;
            if (!bfile.empty()) {
                std::ifstream bf(bfile);
                require(bf.good(), ErrorCode::InvalidInput, "cannot open " + bfile);
                Json bj;
                bf >> bj;
                for (const auto& [key, val] : bj.items())
                    b[std::stoll(key)] = matrix_from_json(val, "bfile[" + key + "]");
            } else {
                require(delta >= 0.0, ErrorCode::InvalidInput,
                        "perturb: give --delta or --bfile");
                b = seeded_perturbation(cert.dim(), w.lo, w.hi - 1, delta, seed);
            }
            RoughnessReport rep = verify_roughness(cert, b, rw.lo, rw.hi, mode, {}, in.tol);
            report["tolerances"] = tolerances_to_json(in.tol);
            report["seed"] = seed;
            report["delta"] = delta;
            report["predicted"] = Json{{"rho_delta", rep.predicted.rho_delta},
                                       {"beta", rep.predicted.beta},
                                       {"gamma", rep.predicted.gamma},
                                       {"D1", rep.predicted.d1},
                                       {"D2", rep.predicted.d2},
                                       {"L", rep.predicted.L},
                                       {"qp_bound", rep.predicted.qp_bound},
                                       {"admissible", rep.predicted.admissible}};
            report["measured"] =
                Json{{"max_qp_distance", judged(rep.max_qp_distance, rep.predicted.qp_bound)},
                     {"invariance_residual", judged(rep.max_invariance_residual, 1e-8)},
                     {"l_at_beta", rep.measured_l_at_beta},
                     {"rank_preserved", rep.rank_preserved}};
            report["verify"] = verify_report_to_json(rep.perturbed_verify);
            report["verdict"] = rep.pass ? "pass" : "fail";
            return finish(rep.pass ? 0 : 1);
        } else if (app.got_subcommand(c_constants)) {
            require(in.k_flag >= 1.0 && in.alpha_flag > 0.0, ErrorCode::InvalidInput,
                    "constants: need --K >= 1 and --alpha > 0");
            if (ode) {
                OdeConstants c = ode_constants(in.k_flag, in.alpha_flag, delta);
                report["ode"] = Json{{"admissible", c.admissible},
                                     {"beta", c.beta},
                                     {"L", c.l},
                                     {"qp_bound", c.qp_bound}};
            } else {
                RoughnessConstants c = predicted_constants(in.k_flag, in.alpha_flag, delta);
                report["constants"] = Json{{"delta", c.delta},
                                           {"rho_delta", c.rho_delta},
                                           {"admissible", c.admissible},
                                           {"beta", c.beta},
                                           {"gamma", c.gamma},
                                           {"D1", c.d1},
                                           {"D2", c.d2},
                                           {"L", c.L},
                                           {"qp_bound", c.qp_bound}};
            }
            report["verdict"] = "pass";
        } else if (app.got_subcommand(c_ft)) {
            in.resolve();
            WindowArg scan = parse_window(scan_s);
            FiniteTimeHypothesis hyp;
            hyp.window_n = big_n;
            hyp.density_gap = ell;
            hyp.k_const = in.k_flag > 0 ? in.k_flag : 1.0;
            hyp.alpha = in.alpha_flag > 0 ? in.alpha_flag : std::log(2.0);
            hyp.kbar = kbar;
            hyp.beta_bar = beta_bar;
            hyp.coeff_bound = in.seq->norm_bound().value_or(0.0);
            if (hyp.coeff_bound <= 0.0) {
                for (long long k = scan.lo; k < scan.hi; ++k)
                    hyp.coeff_bound = std::max(hyp.coeff_bound, spectral_norm(in.seq->at(k)));
            }
            for (long long a = scan.lo; a + big_n <= scan.hi; a += base_step)
                hyp.base_points.push_back(a);
            FiniteTimeReport rep = finite_time_check(in.seq, hyp, scan.lo, scan.hi, mode, in.tol);
            report["tolerances"] = tolerances_to_json(in.tol);
            report["stages"] = Json{
                {"coeff_bound",
                 Json{{"ok", rep.coeff_bound_ok}, {"max_norm", rep.max_coeff_norm},
                      {"bound", hyp.coeff_bound}}},
                {"density", Json{{"ok", rep.density_ok}, {"max_gap", rep.max_gap},
                                 {"ell", ell}}},
                {"windows", Json{{"ok", rep.windows_ok},
                                 {"worst_base", rep.worst_base},
                                 {"worst_margin", rep.worst_window_margin},
                                 {"rank", rep.rank},
                                 {"ranks_consistent", rep.ranks_consistent}}},
                {"global_empirical",
                 Json{{"ok", rep.global_ok}, {"margin", rep.global_margin}}}};
            report["hypotheses_pass"] = rep.hypotheses_pass;
            report["verdict"] = rep.pass ? "pass" : "fail";
            return finish(rep.pass ? 0 : 1);
        }
        return finish(0);
    } catch (const DichotomyError& e) {
        report["verdict"] = "error";
        report["error"] = Json{{"code", error_code_name(e.code())}, {"message", e.what()}};
        return finish(exit_code_for(e.code()));
    } catch (const std::exception& e) {
        report["verdict"] = "error";
        report["error"] = Json{{"code", "InternalError"}, {"message", e.what()}};
        return finish(2);
    }
}

}  // namespace dichotomy::cli
