// Command-line harness for the GZSL adaptation pipeline.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "gzsl/gzsl.hpp"

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int runs = 5;
  std::string acc = "per-class";
  std::vector<double> lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};

  gzsl::AccuracyKind acc_kind() const {
    return acc == "per-sample" ? gzsl::AccuracyKind::PerSample : gzsl::AccuracyKind::PerClass;
  }
};

struct ModelOpts {
  std::string model = "linear-vs";
  double lr = 1e-3;
  int epochs = 20;
  double margin_fraction = 0.1;
  double init_scale = 1e-3;

  gzsl::ModelSpec spec(const GlobalOpts& g) const {
    gzsl::ModelSpec s;
    if (model == "linear-vs") {
      s.family = gzsl::ModelFamily::LinearVS;
    } else if (model == "linear-sv") {
      s.family = gzsl::ModelFamily::LinearSV;
    } else {
      s.family = gzsl::ModelFamily::BilinearRanking;
      s.variant = model == "devise" ? gzsl::RankingVariant::DEVISE
                : model == "sje"    ? gzsl::RankingVariant::SJE
                                    : gzsl::RankingVariant::ALE;
    }
    s.sgd.learning_rate = lr;
    s.sgd.epochs = epochs;
    s.sgd.margin_fraction = margin_fraction;
    s.sgd.init_scale = init_scale;
    s.sgd.seed = g.seed;
    return s;
  }
};

void add_model_flags(CLI::App* cmd, ModelOpts& m) {
  cmd->add_option("--model", m.model, "scorer family")
      ->check(CLI::IsMember({"linear-vs", "linear-sv", "ale", "devise", "sje"}));
  cmd->add_option("--lr", m.lr, "SGD learning rate (ranking models)");
  cmd->add_option("--epochs", m.epochs, "SGD epochs (ranking models)");
  cmd->add_option("--margin-fraction", m.margin_fraction, "hinge margin fraction");
  cmd->add_option("--init-scale", m.init_scale, "uniform init scale");
}

nlohmann::ordered_json config_echo(const GlobalOpts& g, const ModelOpts& m) {
  nlohmann::ordered_json j;
  j["model"] = m.model;
  j["acc"] = g.acc;
  j["runs"] = g.runs;
  j["seed"] = g.seed;
  j["lambda_grid"] = g.lambda_grid;
  if (m.model != "linear-vs" && m.model != "linear-sv") {
    j["lr"] = m.lr;
    j["epochs"] = m.epochs;
    j["margin_fraction"] = m.margin_fraction;
    j["init_scale"] = m.init_scale;
  }
  return j;
}

void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw gzsl::Error(gzsl::ErrorCode::IoError, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

gzsl::ExperimentConfig experiment(const GlobalOpts& g, const ModelOpts& m) {
  gzsl::ExperimentConfig cfg;
  cfg.model = m.spec(g);
  cfg.lambda_grid = g.lambda_grid;
  cfg.acc_kind = g.acc_kind();
  cfg.n_runs = g.runs;
  cfg.seed = g.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GZSL adaptation harness: splits, calibration, regularization selection"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--runs", g.runs, "runs for seed-dependent models");
  app.add_option("--acc", g.acc, "accuracy kind")->check(CLI::IsMember({"per-class", "per-sample"}));
  app.add_option("--lambda-grid", g.lambda_grid, "comma-separated lambda values")->delimiter(',');

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset directory");
  gzsl::SyntheticConfig syn;
  std::string out_dir;
  synth->add_option("--classes", syn.n_classes, "number of classes");
  synth->add_option("--samples-per-class", syn.samples_per_class, "samples per class");
  synth->add_option("--dim", syn.feature_dim, "feature dimension");
  synth->add_option("--attr-dim", syn.attribute_dim, "attribute dimension");
  synth->add_option("--inter-var", syn.inter_var, "inter-class variance knob");
  synth->add_option("--intra-var", syn.intra_var, "intra-class variance knob");
  synth->add_option("--noise-var", syn.noise_var, "observation noise variance");
  synth->add_option("--out", out_dir, "output dataset directory")->required();

  // shared data/split options
  std::string data_dir, split_path, out_path;
  bool no_normalize = false;

  auto add_data_flag = [&](CLI::App* cmd) {
    cmd->add_option("--data", data_dir, "dataset directory")->required();
    cmd->add_flag("--no-normalize-prototypes", no_normalize,
                  "skip l2 normalization of class prototypes");
  };

  // split
  auto* split_cmd = app.add_subcommand("split", "build a GZSL split file");
  gzsl::SplitConfig sc;
  add_data_flag(split_cmd);
  split_cmd->add_option("--val-classes", sc.n_val_classes, "validation class count")->required();
  split_cmd->add_option("--test-classes", sc.n_test_classes, "test class count")->required();
  split_cmd->add_option("--seen-test-fraction", sc.seen_test_fraction, "seen test fraction");
  split_cmd->add_option("--seen-val-fraction", sc.seen_val_fraction, "seen val fraction");
  split_cmd->add_option("--folds", sc.n_val_folds, "validation folds");
  split_cmd->add_option("--out", out_path, "output split file")->required();

  ModelOpts zsl_m, gzsl_m, curve_m;

  // zsl
  auto* zsl_cmd = app.add_subcommand("zsl", "classical ZSL evaluation");
  add_data_flag(zsl_cmd);
  zsl_cmd->add_option("--split", split_path, "split file")->required();
  add_model_flags(zsl_cmd, zsl_m);
  zsl_cmd->add_option("--out", out_path, "output report file")->required();

  // gzsl
  auto* gzsl_cmd = app.add_subcommand("gzsl", "GZSL evaluation with the adaptation process");
  add_data_flag(gzsl_cmd);
  gzsl_cmd->add_option("--split", split_path, "split file")->required();
  add_model_flags(gzsl_cmd, gzsl_m);
  bool no_calibration = false;
  std::string lambda_mode = "gzsl";
  gzsl_cmd->add_flag("--no-calibration", no_calibration, "skip the seen-class penalty");
  gzsl_cmd->add_option("--lambda-mode", lambda_mode, "regularization selection target")
      ->check(CLI::IsMember({"zsl", "gzsl"}));
  gzsl_cmd->add_option("--out", out_path, "output report file")->required();

  // curve
  auto* curve_cmd = app.add_subcommand("curve", "seen-unseen trade-off curve and AUSUC");
  add_data_flag(curve_cmd);
  curve_cmd->add_option("--split", split_path, "split file")->required();
  add_model_flags(curve_cmd, curve_m);
  double curve_lambda = -1.0;
  curve_cmd->add_option("--lambda", curve_lambda, "fixed lambda (default: select via GZSL protocol)");
  curve_cmd->add_option("--out", out_path, "output CSV file")->required();

  // mse-curve
  auto* mse_cmd = app.add_subcommand("mse-curve", "attribute MSE versus lambda diagnostic");
  add_data_flag(mse_cmd);
  mse_cmd->add_option("--split", split_path, "split file")->required();
  mse_cmd->add_option("--out", out_path, "output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    if (synth->parsed()) {
      syn.seed = g.seed;
      gzsl::write_dataset(gzsl::generate(syn), out_dir);
      std::cout << "wrote dataset to " << out_dir << "\n";
      return 0;
    }

    gzsl::Dataset d = gzsl::load_dataset(data_dir, !no_normalize);

    if (split_cmd->parsed()) {
      sc.seed = g.seed;
      gzsl::ClassPartition part = gzsl::make_partition(d, sc);
      gzsl::GzslSplit split = gzsl::make_gzsl_split(d, part, sc);
      gzsl::write_split_file(split, gzsl::make_validation_folds(d, sc), g.seed, out_path);
      std::cout << "wrote split to " << out_path << "\n";
      return 0;
    }

    auto [split, folds] = gzsl::load_split_file(split_path);

    if (zsl_cmd->parsed()) {
      gzsl::ZslReport r = gzsl::run_zsl_evaluation(d, split, folds, experiment(g, zsl_m));
      auto j = gzsl::report_to_json(r);
      j["config"] = config_echo(g, zsl_m);
      write_json(j, out_path);
      std::cout << "A_u->Cu = " << r.acc_unseen << " +/- " << r.acc_unseen_std
                << " (lambda* = " << r.lambda_star << ")\n";
    } else if (gzsl_cmd->parsed()) {
      gzsl::GzslOptions opts;
      opts.calibrate = !no_calibration;
      opts.lambda_mode = lambda_mode == "zsl" ? gzsl::LambdaMode::Zsl : gzsl::LambdaMode::Gzsl;
      gzsl::GzslReport r = gzsl::run_gzsl_evaluation(d, split, folds, experiment(g, gzsl_m), opts);
      auto j = gzsl::report_to_json(r);
      j["config"] = config_echo(g, gzsl_m);
      j["config"]["calibration"] = opts.calibrate;
      j["config"]["lambda_mode"] = lambda_mode;
      write_json(j, out_path);
      std::cout << "H = " << r.harmonic_mean << " (A_u = " << r.acc_unseen_in_all
                << ", A_s = " << r.acc_seen_in_all << ", AUSUC = " << r.ausuc
                << ", lambda* = " << r.lambda_star << ", gamma* = " << r.gamma_star << ")\n";
    } else if (curve_cmd->parsed()) {
      gzsl::ExperimentConfig cfg = experiment(g, curve_m);
      double lambda = curve_lambda;
      if (lambda < 0.0) lambda = gzsl::select_lambda_gamma_gzsl(d, folds, cfg).first;
      gzsl::ModelSpec spec = cfg.model;
      spec.lambda = lambda;
      gzsl::IndexSet refit = split.train_idx;
      refit.insert(refit.end(), split.seen_val_idx.begin(), split.seen_val_idx.end());
      refit.insert(refit.end(), split.unseen_val_idx.begin(), split.unseen_val_idx.end());
      std::sort(refit.begin(), refit.end());
      gzsl::FitResult fit = gzsl::fit_model(d, refit, spec);
      gzsl::IndexSet test_pool = split.seen_test_idx;
      test_pool.insert(test_pool.end(), split.unseen_test_idx.begin(), split.unseen_test_idx.end());
      std::sort(test_pool.begin(), test_pool.end());
      gzsl::ClassSet seen =
          gzsl::set_union(split.partition.train_classes, split.partition.val_classes);
      gzsl::ScoreMatrix sm = gzsl::detail::score_pool(
          d, fit, test_pool, gzsl::set_union(seen, split.partition.test_classes), seen);
      gzsl::Labels truth;
      for (std::size_t i : test_pool) truth.push_back(d.labels[i]);
      gzsl::write_curve(gzsl::tradeoff_curve(sm, truth, cfg.acc_kind), out_path);
      std::cout << "AUSUC = " << gzsl::ausuc(sm, truth, cfg.acc_kind)
                << " (lambda = " << lambda << ")\n";
    } else if (mse_cmd->parsed()) {
      gzsl::MseCurves curves = gzsl::mse_vs_lambda_curves(d, split, g.lambda_grid);
      std::ofstream out(out_path);
      if (!out)
        throw gzsl::Error(gzsl::ErrorCode::IoError, "cannot open " + out_path + " for writing");
      out << "lambda,seen_mse,unseen_mse\n" << std::setprecision(17);
      for (std::size_t i = 0; i < curves.lambdas.size(); ++i)
        out << curves.lambdas[i] << "," << curves.seen_mse[i] << "," << curves.unseen_mse[i]
            << "\n";
      std::cout << "wrote MSE curves to " << out_path << "\n";
    }
    return 0;
  } catch (const gzsl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
