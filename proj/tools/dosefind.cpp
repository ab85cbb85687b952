// dosefind command-line tool. Every subcommand assembles the same JSON
// request the HTTP service accepts; --json prints the service response bytes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dosefind/api.hpp"
#include "dosefind/service.hpp"

using namespace dosefind;
using dosefind::api::Fields;

namespace {

std::string read_file(const std::string &path, const std::string &flag) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path, flag);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string &text, const std::string &path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

// JSON field name -> the flag that sets it.
std::string flag_for(std::string field) {
  if (field.empty()) return field;
  if (auto dot = field.rfind('.'); dot != std::string::npos && field.find('[') == std::string::npos)
    field = field.substr(dot + 1);
  if (field == "draws_per_chain") return "--draws";
  if (field == "csv") return "--data";
  if (field == "omega_lkj_eta" || field.rfind("priors", 0) == 0) return "--priors";
  if (field.find('[') != std::string::npos) return "--data";
  for (auto &c : field)
    if (c == '_') c = '-';
  return "--" + field;
}

// Options write straight into the request object, so keys the user did not
// pass stay absent and defaults are applied in one place.
struct Request {
  Json body = Json::object();

  CLI::Option *number(CLI::App *app, const std::string &flag, const std::string &key, const std::string &help) {
    return app->add_option_function<double>(flag, [this, key](const double &v) { body[key] = v; }, help);
  }
  CLI::Option *integer(CLI::App *app, const std::string &flag, const std::string &key, const std::string &help) {
    return app->add_option_function<int>(flag, [this, key](const int &v) { body[key] = v; }, help);
  }
  CLI::Option *text(CLI::App *app, const std::string &flag, const std::string &key, const std::string &help) {
    return app->add_option_function<std::string>(flag, [this, key](const std::string &v) { body[key] = v; }, help);
  }
  CLI::Option *numbers(CLI::App *app, const std::string &flag, const std::string &key, const std::string &help) {
    return app->add_option_function<std::vector<double>>(
           flag, [this, key](const std::vector<double> &v) { body[key] = v; }, help)
        ->delimiter(',');
  }
  CLI::Option *integers(CLI::App *app, const std::string &flag, const std::string &key, const std::string &help) {
    return app->add_option_function<std::vector<int>>(
           flag, [this, key](const std::vector<int> &v) { body[key] = v; }, help)
        ->delimiter(',');
  }

  void sampler(CLI::App *app) {
    app->add_option_function<std::uint64_t>("--seed", [this](const std::uint64_t &v) { body["seed"] = v; },
                                            "random seed (default 123)");
    auto set = [this](const char *key) {
      return [this, key](const int &v) { body["sampler"][key] = v; };
    };
    app->add_option_function<int>("--chains", set("chains"), "MCMC chains (default 4)");
    app->add_option_function<int>("--warmup", set("warmup"), "warmup draws per chain (default 1000)");
    app->add_option_function<int>("--draws", set("draws_per_chain"), "kept draws per chain (default 1000)");
    app->add_option_function<int>("--thin", set("thin"), "iterations per kept draw (0 = automatic)");
  }

  void crm_spec(CLI::App *app) {
    text(app, "--model", "model", "empiric | logistic | logistic_gamma | logistic2");
    numbers(app, "--skeleton", "skeleton", "prior toxicity guesses, comma separated");
    number(app, "--target", "target", "target toxicity probability");
    number(app, "--a0", "a0", "fixed intercept (logistic models)");
    number(app, "--beta-mean", "beta_mean", "prior mean of beta");
    number(app, "--beta-sd", "beta_sd", "prior sd of beta");
    number(app, "--beta-shape", "beta_shape", "gamma prior shape (logistic_gamma)");
    number(app, "--beta-rate", "beta_rate", "gamma prior rate (logistic_gamma)");
    number(app, "--alpha-mean", "alpha_mean", "prior mean of alpha (logistic2)");
    number(app, "--alpha-sd", "alpha_sd", "prior sd of alpha (logistic2)");
  }

  void efftox_spec(CLI::App *app) {
    numbers(app, "--real-doses", "real_doses", "dose amounts, comma separated");
    number(app, "--efficacy-hurdle", "efficacy_hurdle", "minimum acceptable efficacy");
    number(app, "--toxicity-hurdle", "toxicity_hurdle", "maximum acceptable toxicity");
    number(app, "--p-e", "p_e", "certainty required for efficacy acceptability");
    number(app, "--p-t", "p_t", "certainty required for toxicity acceptability");
    number(app, "--eff0", "eff0", "efficacy with zero toxicity on the neutral contour");
    number(app, "--tox1", "tox1", "toxicity with certain efficacy on the neutral contour");
    number(app, "--eff-star", "eff_star", "efficacy of the intermediate hinge point");
    number(app, "--tox-star", "tox_star", "toxicity of the intermediate hinge point");
    for (const char *p : {"alpha", "beta", "gamma", "zeta", "eta", "psi"}) {
      const std::string name = p;
      number(app, "--" + name + "-mean", name + "_mean", "prior mean of " + name);
      number(app, "--" + name + "-sd", name + "_sd", "prior sd of " + name);
    }
  }

  void crm_policy(CLI::App *app, std::string &policy, Json &careful) {
    app->add_option("--policy", policy, "default | careful_escalation")->capture_default_str();
    auto set = [&careful](const char *key) {
      return [&careful, key](const double &v) { careful[key] = v; };
    };
    app->add_option_function<double>("--tox-threshold", set("tox_threshold"), "careful policy toxicity limit");
    app->add_option_function<double>("--certainty-threshold", set("certainty_threshold"),
                                     "careful policy stopping certainty");
    app->add_option_function<int>(
        "--reference-dose", [&careful](const int &v) { careful["reference_dose"] = v; },
        "careful policy stopping dose");
  }

  void augbin_data(CLI::App *app) {
    app->add_option_function<std::string>(
        "--data", [this](const std::string &path) { body["csv"] = read_file(path, "--data"); },
        "CSV with columns z0,z1,z2,d1,d2");
  }

  void priors(CLI::App *app) {
    app->add_option_function<std::string>(
        "--priors",
        [this](const std::string &v) {
          if (v == "diffuse" || v == "informative")
            body["priors"] = v;
          else
            body["priors"] = api::parse_request(read_file(v, "--priors"));
        },
        "diffuse | informative | path to a JSON prior object");
  }
};

std::string dtp_output(const PathwayTree &tree, const std::string &format) {
  if (format == "wide") return wide_csv(tree);
  if (format == "long") return long_csv(tree);
  return export_graph(tree, graph_format_from_string(format));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bayesian dose-finding: CRM, EffTox, augmented binary and dose transition pathways"};
  app.require_subcommand(1);
  Request req;
  bool json = false;
  std::string output;
  std::string policy = "default";
  Json careful = Json::object();
  std::string format = "wide";
  int contour = 0;
  std::function<void()> run;

  auto common = [&](CLI::App *cmd) {
    cmd->add_flag("--json", json, "print the JSON response of the matching service endpoint");
    cmd->add_option("-o,--output", output, "write to a file instead of stdout");
    req.sampler(cmd);
  };

  auto *fit = app.add_subcommand("fit", "fit a model and report the recommendation");
  fit->require_subcommand(1);

  auto *fit_crm = fit->add_subcommand("crm", "continual reassessment method");
  req.crm_spec(fit_crm);
  req.text(fit_crm, "--outcomes", "outcomes", "outcome string, e.g. \"1NN 2NT\"");
  req.integers(fit_crm, "--doses", "doses", "dose level per patient (weighted form)");
  req.integers(fit_crm, "--tox", "tox", "toxicity flag per patient (weighted form)");
  req.numbers(fit_crm, "--weights", "weights", "follow-up weight per patient");
  common(fit_crm);
  fit_crm->callback([&] {
    run = [&] {
      if (json) return write_output(service::render(api::fit_crm(req.body)), output);
      Fields f(req.body);
      const auto spec = api::read_crm_spec(f);
      OutcomeSequence data;
      if (req.body.contains("doses") || req.body.contains("tox")) {
        const auto doses = f.integers("doses");
        const auto tox = f.integers("tox");
        const auto w = f.opt_numbers("weights").value_or(std::vector<double>(doses.size(), 1.0));
        data = from_vectors(doses, tox, w);
      } else {
        try {
          data = parse_outcomes(f.opt_string("outcomes").value_or(""), Alphabet::binary);
        } catch (const ValidationError &e) {
          throw ValidationError(e.what(), "outcomes");
        }
      }
      const auto sampler = api::read_sampler(f);
      f.finish();
      write_output(crm_fit_text(dosefind::fit_crm(spec, data, sampler)), output);
    };
  });

  auto *fit_eff = fit->add_subcommand("efftox", "EffTox efficacy-toxicity trade-off design");
  req.efftox_spec(fit_eff);
  req.text(fit_eff, "--outcomes", "outcomes", "outcome string over E, T, N, B, e.g. \"1NNN 2ENN\"");
  fit_eff->add_option("--contour", contour, "contour grid resolution in --json output (0 = none)");
  common(fit_eff);
  fit_eff->callback([&] {
    run = [&] {
      if (contour) req.body["contour_resolution"] = contour;
      if (json) return write_output(service::render(api::fit_efftox(req.body)), output);
      Fields f(req.body);
      const auto spec = api::read_efftox_spec(f);
      OutcomeSequence data(Alphabet::quaternary);
      try {
        data = parse_outcomes(f.opt_string("outcomes").value_or(""), Alphabet::quaternary);
      } catch (const ValidationError &e) {
        throw ValidationError(e.what(), "outcomes");
      }
      (void)f.opt_integer("contour_resolution");
      const auto sampler = api::read_sampler(f);
      f.finish();
      write_output(efftox_fit_text(dosefind::fit_efftox(spec, data, sampler)), output);
    };
  });

  auto *fit_aug = fit->add_subcommand("augbin", "augmented binary tumour-size model");
  req.augbin_data(fit_aug);
  req.priors(fit_aug);
  req.number(fit_aug, "--y2-upper", "y2_upper", "success threshold on log tumour-size ratio");
  req.number(fit_aug, "--conf-level", "conf_level", "binary comparator confidence level");
  common(fit_aug);
  fit_aug->callback([&] {
    run = [&] {
      const auto res = api::fit_augbin(req.body);
      if (json) return write_output(service::render(res), output);
      std::string text = "Mean probability of success: ";
      double mean = 0.0;
      for (const auto &p : res["predictions"]) mean += p["prob_success"].get<double>() / res["predictions"].size();
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.4f\nMean interval width: %.4f (binary %.4f, change %+.1f%%)\n", mean,
                    res["mean_ci_width"].get<double>(), res["binary"]["ci_width"].get<double>(),
                    100.0 * res["ci_width_change"].get<double>());
      write_output(text + buf, output);
    };
  });

  auto *dtp = app.add_subcommand("dtp", "dose transition pathways");
  dtp->require_subcommand(1);
  auto dtp_flags = [&](CLI::App *cmd) {
    req.text(cmd, "--outcomes", "outcomes", "outcomes observed so far");
    req.integers(cmd, "--cohort-sizes", "cohort_sizes", "sizes of the future cohorts, comma separated")->required();
    req.integer(cmd, "--next-dose", "next_dose", "override the dose for the first future cohort");
    cmd->add_option("--format", format, "wide | long | dot | json")
        ->check(CLI::IsMember({"wide", "long", "dot", "json"}))
        ->capture_default_str();
    common(cmd);
  };

  auto *dtp_crm = dtp->add_subcommand("crm", "pathways under a CRM model");
  req.crm_spec(dtp_crm);
  req.crm_policy(dtp_crm, policy, careful);
  dtp_flags(dtp_crm);
  dtp_crm->callback([&] {
    run = [&] {
      if (policy == "careful_escalation" || !careful.empty()) {
        careful["name"] = policy;
        req.body["policy"] = careful;
      } else {
        req.body["policy"] = policy;
      }
      if (json) return write_output(service::render(api::dtp_crm(req.body, {SIZE_MAX, std::chrono::hours(24)})), output);
      Fields f(req.body);
      const auto spec = api::read_crm_spec(f);
      const auto data = parse_outcomes(f.opt_string("outcomes").value_or(""), Alphabet::binary);
      const auto pol = api::read_crm_policy(*f.get("policy"), "policy");
      DtpOptions o;
      o.cohort_sizes = f.integers("cohort_sizes");
      o.next_dose = f.opt_integer("next_dose");
      o.sampler = api::read_sampler(f);
      f.finish();
      write_output(dtp_output(crm_dtps(spec, data, o, pol.make()), format), output);
    };
  });

  auto *dtp_eff = dtp->add_subcommand("efftox", "pathways under an EffTox model");
  req.efftox_spec(dtp_eff);
  dtp_flags(dtp_eff);
  dtp_eff->callback([&] {
    run = [&] {
      if (json)
        return write_output(service::render(api::dtp_efftox(req.body, {SIZE_MAX, std::chrono::hours(24)})), output);
      Fields f(req.body);
      const auto spec = api::read_efftox_spec(f);
      const auto data = parse_outcomes(f.opt_string("outcomes").value_or(""), Alphabet::quaternary);
      DtpOptions o;
      o.cohort_sizes = f.integers("cohort_sizes");
      o.next_dose = f.opt_integer("next_dose");
      o.sampler = api::read_sampler(f);
      f.finish();
      write_output(dtp_output(efftox_dtps(spec, data, o), format), output);
    };
  });

  auto *aug = app.add_subcommand("augbin", "augmented binary utilities");
  aug->require_subcommand(1);

  auto *pred = aug->add_subcommand("predict", "per-patient probability of success");
  req.augbin_data(pred);
  req.priors(pred);
  req.number(pred, "--y2-upper", "y2_upper", "success threshold on log tumour-size ratio");
  common(pred);
  pred->callback([&] {
    run = [&] {
      const auto res = api::augbin_predict(req.body);
      if (json) return write_output(service::render(res), output);
      std::string csv = "id,z0,z1,prob_success,lower,upper,ci_width\n";
      char buf[256];
      for (const auto &p : res["predictions"]) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p["id"].get<int>(),
                      p["z0"].get<double>(), p["z1"].get<double>(), p["prob_success"].get<double>(),
                      p["lower"].get<double>(), p["upper"].get<double>(), p["ci_width"].get<double>());
        csv += buf;
      }
      write_output(csv, output);
    };
  });

  auto *prior = aug->add_subcommand("prior-predictive", "draw tumour sizes and events from the prior");
  req.priors(prior);
  req.integer(prior, "--num-samps", "num_samps", "number of prior draws (default 1000)");
  req.numbers(prior, "--z0-range", "z0_range", "baseline size range, lower,upper (default 5,10)");
  common(prior);
  prior->callback([&] {
    run = [&] {
      const auto res = api::augbin_prior_predictive(req.body);
      if (json) return write_output(service::render(res), output);
      std::string csv = "z0,y1,y2,prob_d1,prob_d2,d1,d2\n";
      char buf[256];
      for (const auto &r : res["samples"]) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", r["z0"].get<double>(),
                      r["y1"].get<double>(), r["y2"].get<double>(), r["prob_d1"].get<double>(),
                      r["prob_d2"].get<double>(), r["d1"].get<int>(), r["d2"].get<int>());
        csv += buf;
      }
      write_output(csv, output);
    };
  });

  auto *sim = aug->add_subcommand("simulate", "simulate a two-period tumour-size dataset");
  req.integer(sim, "--n", "n", "number of patients (default 50)");
  req.number(sim, "--delta1", "delta1", "mean log size ratio at the second assessment");
  req.number(sim, "--sigma", "sigma", "residual sd");
  req.number(sim, "--alpha-d", "alpha_d", "dropout intercept");
  req.number(sim, "--gamma-d", "gamma_d", "dropout slope on size");
  common(sim);
  sim->callback([&] {
    run = [&] {
      const auto res = api::augbin_simulate(req.body);
      if (json) return write_output(service::render(res), output);
      AugBinDataset data;
      for (const auto &r : res["data"])
        data.patients.push_back({r["z0"].get<double>(), r["z1"].get<double>(), r["z2"].get<double>(),
                                 r["d1"].get<int>(), r["d2"].get<int>()});
      write_output(write_augbin_csv(data), output);
    };
  });

  auto *serve = app.add_subcommand("serve", "run the JSON HTTP service");
  std::string bind;
  std::string data_dir;
  serve->add_option("--bind", bind, "host:port (env DOSEFIND_BIND, default 127.0.0.1:8080)");
  serve->add_option("--data-dir", data_dir, "session log directory (env DOSEFIND_DATA_DIR)");
  serve->callback([&] {
    run = [&] {
      auto config = service::Config::from_env();
      if (!data_dir.empty()) config.data_dir = data_dir;
      if (!config.data_dir) config.data_dir = "dosefind-data";
      if (bind.empty())
        if (const char *b = std::getenv("DOSEFIND_BIND")) bind = b;
      const auto [host, port] = service::parse_bind(bind);
      service::Service svc(config);
      std::fprintf(stderr, "dosefind listening on %s:%d, sessions in %s\n", host.c_str(), port,
                   config.data_dir->c_str());
      svc.serve(host, port);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    run();
    return 0;
  } catch (const ValidationError &e) {
    const auto flag = flag_for(e.field());
    std::fprintf(stderr, "error%s%s: %s\n", flag.empty() ? "" : " in ", flag.c_str(), e.what());
    return 2;
  } catch (const SamplerError &e) {
    std::fprintf(stderr, "sampler failure: %s\n", e.what());
    return 3;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
