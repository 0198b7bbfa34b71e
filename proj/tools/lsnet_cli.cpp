#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "lps/classical.hpp"
#include "lps/encoding.hpp"
#include "lps/io.hpp"
#include "lps/lsnet.hpp"
#include "lps/metrics.hpp"
#include "lps/phantom.hpp"
#include "lps/training.hpp"

namespace fs = std::filesystem;
using namespace lps;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::size_t worker_count() {
  if (const char *env = std::getenv("LSNET_THREADS")) {
    const long n = std::atol(env);
    if (n > 0)
      return std::size_t(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

std::string sample_stem(const std::string &dir, std::size_t i) {
  std::ostringstream os;
  os << dir << "/sample_" << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

ComplexTensor mask_to_tensor(const SamplingMask &mask) {
  ComplexTensor t({mask.ny, mask.nt});
  for (std::size_t j = 0; j < mask.ny; ++j)
    for (std::size_t k = 0; k < mask.nt; ++k)
      t.at(j, k) = double(mask.at(j, k));
  return t;
}

SamplingMask tensor_to_mask(const ComplexTensor &t, const Manifest &meta) {
  if (t.ndim() != 2)
    throw DataError("mask tensor must be 2-dim [ny,nt]");
  SamplingMask mask;
  mask.ny = t.dim(0);
  mask.nt = t.dim(1);
  mask.pattern.assign(mask.ny * mask.nt, 0);
  for (std::size_t i = 0; i < t.size(); ++i)
    mask.pattern[i] = t[i] != cplx(0.0, 0.0) ? 1 : 0;
  mask.target_af = manifest_get_double(meta, "af");
  mask.n_center = std::size_t(manifest_get_long(meta, "n_center"));
  mask.seed = std::uint64_t(manifest_get_long(meta, "mask_seed"));
  return mask;
}

EncodingOperator load_operator(const std::string &op_manifest_path) {
  const Manifest meta = read_manifest(op_manifest_path);
  const fs::path base = fs::path(op_manifest_path).parent_path();
  const ComplexTensor mask_t =
      read_cxt((base / manifest_get(meta, "mask")).string());
  SamplingMask mask = tensor_to_mask(mask_t, meta);
  const std::size_t nx = std::size_t(manifest_get_long(meta, "nx"));
  if (meta.count("sens"))
    return EncodingOperator(std::move(mask),
                            read_cxt((base / meta.at("sens")).string()));
  return EncodingOperator(std::move(mask), nx);
}

struct GenSpec {
  std::size_t n_samples, nx, ny, nt, rank, blobs, n_center, nc;
  double af, noise_std;
  std::uint64_t seed;
};

GenSpec read_gen_spec(const std::string &path) {
  const Manifest m = read_manifest(path);
  GenSpec s;
  s.n_samples = std::size_t(manifest_get_long(m, "n_samples"));
  s.nx = std::size_t(manifest_get_long(m, "nx"));
  s.ny = std::size_t(manifest_get_long(m, "ny"));
  s.nt = std::size_t(manifest_get_long(m, "nt"));
  s.rank = m.count("background_rank")
               ? std::size_t(manifest_get_long(m, "background_rank"))
               : 3;
  s.blobs = m.count("n_blobs") ? std::size_t(manifest_get_long(m, "n_blobs"))
                               : 2;
  s.af = manifest_get_double(m, "af");
  s.n_center =
      m.count("n_center") ? std::size_t(manifest_get_long(m, "n_center")) : 4;
  s.nc = m.count("nc") ? std::size_t(manifest_get_long(m, "nc")) : 0;
  s.noise_std = m.count("noise_std") ? manifest_get_double(m, "noise_std")
                                     : 0.0;
  s.seed = m.count("seed") ? std::uint64_t(manifest_get_long(m, "seed")) : 0;
  return s;
}

TrainSample generate_one(const GenSpec &g, std::size_t i) {
  PhantomSpec spec;
  spec.nx = g.nx;
  spec.ny = g.ny;
  spec.nt = g.nt;
  spec.background_rank = g.rank;
  spec.n_blobs = g.blobs;
  spec.seed = g.seed + 1000003ull * i;
  MaskConfig mask_cfg{g.af, g.n_center, g.seed + 7000003ull * i + 1};
  CoilConfig coil_cfg{g.nc, g.seed + 13ull * i + 2};
  return make_sample(spec, mask_cfg, coil_cfg, g.noise_std);
}

int cmd_gen_data(const std::string &spec_path, const std::string &out_dir) {
  const GenSpec g = read_gen_spec(spec_path);
  fs::create_directories(out_dir);

  std::vector<TrainSample> samples(g.n_samples,
                                   TrainSample{{}, EncodingOperator({}, 1), {}});
  const std::size_t workers =
      std::min<std::size_t>(std::max<std::size_t>(worker_count(), 1),
                            std::max<std::size_t>(g.n_samples, 1));
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < g.n_samples;
           i = next.fetch_add(1))
        samples[i] = generate_one(g, i);
    });
  for (auto &t : pool)
    t.join();

  for (std::size_t i = 0; i < g.n_samples; ++i) {
    const TrainSample &s = samples[i];
    const std::string stem = sample_stem(out_dir, i);
    write_cxt(stem + "_x.cxt", s.x_ref);
    write_cxt(stem + "_y.cxt", s.y);
    write_cxt(stem + "_mask.cxt", mask_to_tensor(s.op.mask()));
    Manifest op_meta;
    op_meta["nx"] = std::to_string(g.nx);
    op_meta["ny"] = std::to_string(g.ny);
    op_meta["nt"] = std::to_string(g.nt);
    op_meta["af"] = std::to_string(g.af);
    op_meta["n_center"] = std::to_string(g.n_center);
    op_meta["mask_seed"] = std::to_string(s.op.mask().seed);
    op_meta["mask"] = fs::path(stem + "_mask.cxt").filename().string();
    if (s.op.sensitivities()) {
      write_cxt(stem + "_sens.cxt", *s.op.sensitivities());
      op_meta["sens"] = fs::path(stem + "_sens.cxt").filename().string();
    }
    write_manifest(stem + "_op.txt", op_meta);
  }

  Manifest m;
  m["n_samples"] = std::to_string(g.n_samples);
  m["nx"] = std::to_string(g.nx);
  m["ny"] = std::to_string(g.ny);
  m["nt"] = std::to_string(g.nt);
  m["af"] = std::to_string(g.af);
  m["n_center"] = std::to_string(g.n_center);
  m["nc"] = std::to_string(g.nc);
  m["noise_std"] = std::to_string(g.noise_std);
  m["seed"] = std::to_string(g.seed);
  if (g.n_samples > 0)
    m["realized_af"] = std::to_string(samples[0].op.mask().realized_af());
  write_manifest(out_dir + "/manifest.txt", m);
  std::cout << "wrote " << g.n_samples << " samples to " << out_dir << "\n";
  return 0;
}

std::vector<TrainSample> load_dataset(const std::string &dir) {
  const Manifest m = read_manifest(dir + "/manifest.txt");
  const std::size_t n = std::size_t(manifest_get_long(m, "n_samples"));
  std::vector<TrainSample> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string stem = sample_stem(dir, i);
    EncodingOperator op = load_operator(stem + "_op.txt");
    data.push_back(TrainSample{read_cxt(stem + "_y.cxt"), std::move(op),
                               read_cxt(stem + "_x.cxt")});
  }
  return data;
}

int cmd_train(const std::string &data_dir, const std::string &config_path,
              const std::string &out_ckpt, const std::string &loss_csv) {
  const Manifest cfg_m = read_manifest(config_path);
  TrainConfig cfg;
  if (cfg_m.count("epochs"))
    cfg.epochs = int(manifest_get_long(cfg_m, "epochs"));
  if (cfg_m.count("lr0"))
    cfg.lr0 = manifest_get_double(cfg_m, "lr0");
  if (cfg_m.count("decay"))
    cfg.decay = manifest_get_double(cfg_m, "decay");
  if (cfg_m.count("seed"))
    cfg.seed = std::uint64_t(manifest_get_long(cfg_m, "seed"));
  if (cfg_m.count("shuffle"))
    cfg.shuffle = manifest_get_long(cfg_m, "shuffle") != 0;
  const int blocks =
      cfg_m.count("blocks") ? int(manifest_get_long(cfg_m, "blocks")) : 10;
  const std::size_t hidden =
      cfg_m.count("hidden") ? std::size_t(manifest_get_long(cfg_m, "hidden"))
                            : 32;

  const std::vector<TrainSample> data = load_dataset(data_dir);
  LsNetParams model = LsNetParams::init(blocks, hidden, cfg.seed);
  const TrainRecord record = train(model, data, cfg);
  write_checkpoint(out_ckpt, model);

  const std::string csv_path =
      loss_csv.empty() ? out_ckpt + ".loss.csv" : loss_csv;
  std::ofstream csv(csv_path, std::ios::trunc);
  csv << "epoch,mean_loss,lr\n";
  for (std::size_t e = 0; e < record.epoch_loss.size(); ++e)
    csv << e << "," << std::setprecision(17) << record.epoch_loss[e] << ","
        << record.epoch_lr[e] << "\n";

  if (record.diverged) {
    std::cerr << "training diverged (epoch loss exceeded 100x initial)\n";
    return kExitNumeric;
  }
  std::cout << "checkpoint written to " << out_ckpt << "\n";
  return 0;
}

SolverConfig read_solver_config(const std::string &path) {
  const Manifest m = read_manifest(path);
  SolverConfig cfg;
  if (m.count("lambda_L"))
    cfg.lambda_L = manifest_get_double(m, "lambda_L");
  if (m.count("lambda_S"))
    cfg.lambda_S = manifest_get_double(m, "lambda_S");
  if (m.count("rho"))
    cfg.rho = manifest_get_double(m, "rho");
  if (m.count("eta"))
    cfg.eta = manifest_get_double(m, "eta");
  if (m.count("max_iter"))
    cfg.max_iter = int(manifest_get_long(m, "max_iter"));
  if (m.count("tol"))
    cfg.tol = manifest_get_double(m, "tol");
  return cfg;
}

int cmd_recon(const std::string &y_path, const std::string &op_path,
              const std::string &ckpt, const std::string &classical_cfg,
              const std::string &out_prefix, const std::string &log_csv) {
  const ComplexTensor y = read_cxt(y_path);
  const EncodingOperator op = load_operator(op_path);

  ComplexTensor X, L, S;
  const auto t0 = std::chrono::steady_clock::now();
  if (!ckpt.empty()) {
    const LsNetParams params = read_checkpoint(ckpt);
    LsNetOutput out = lsnet_forward(y, op, params, nullptr);
    X = std::move(out.X);
    L = std::move(out.L);
    S = std::move(out.S);
  } else {
    SolverConfig cfg = read_solver_config(classical_cfg);
    cfg.log_penalty = !log_csv.empty();
    SolverState st = lps_solve(y, op, cfg);
    if (st.aborted_nan) {
      std::cerr << "classical solver aborted on NaN at iteration " << st.k
                << "\n";
      return kExitNumeric;
    }
    if (!log_csv.empty()) {
      std::ofstream csv(log_csv, std::ios::trunc);
      csv << "# rho=" << std::setprecision(17) << cfg.rho << "\n";
      csv << "k,penalty,increment\n";
      for (std::size_t k = 0; k < st.increment_history.size(); ++k)
        csv << k << "," << std::setprecision(17) << st.penalty_history[k]
            << "," << st.increment_history[k] << "\n";
      csv << st.increment_history.size() << ","
          << st.penalty_history.back() << ",\n";
    }
    X = std::move(st.X);
    L = std::move(st.L);
    S = std::move(st.S);
  }
  const auto t1 = std::chrono::steady_clock::now();

  write_cxt(out_prefix + "_X.cxt", X);
  write_cxt(out_prefix + "_L.cxt", L);
  write_cxt(out_prefix + "_S.cxt", S);
  std::cout << "recon wall-clock: "
            << std::chrono::duration<double>(t1 - t0).count() << " s\n";
  return 0;
}

int cmd_eval(const std::string &recon_path, const std::string &ref_path,
             const std::string &out_csv) {
  const ComplexTensor x = read_cxt(recon_path);
  const ComplexTensor ref = read_cxt(ref_path);
  if (!x.same_dims(ref)) {
    std::cerr << "eval: dimension mismatch between recon and reference\n";
    return kExitData;
  }
  const double m = mse(x, ref);
  const double p = psnr(x, ref);
  const double s = ssim(x, ref);
  std::ostringstream row;
  row << "mse,psnr_db,ssim\n"
      << std::setprecision(17) << m << ","
      << (std::isinf(p) ? std::string("inf") : std::to_string(p)) << "," << s
      << "\n";
  if (out_csv.empty()) {
    std::cout << row.str();
  } else {
    std::ofstream out(out_csv, std::ios::trunc);
    out << row.str();
  }
  return 0;
}

int cmd_diagnose(const std::string &run_csv) {
  std::ifstream in(run_csv);
  if (!in)
    throw DataError("cannot open " + run_csv);
  std::string line;
  double rho = 1.0;
  SolverState st;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    if (line[0] == '#') {
      const auto eq = line.find("rho=");
      if (eq != std::string::npos)
        rho = std::stod(line.substr(eq + 4));
      continue;
    }
    if (!header_seen) {
      header_seen = true; // column header
      continue;
    }
    std::istringstream row(line);
    std::string k, penalty, increment;
    std::getline(row, k, ',');
    std::getline(row, penalty, ',');
    std::getline(row, increment, ',');
    st.penalty_history.push_back(std::stod(penalty));
    if (!increment.empty())
      st.increment_history.push_back(std::stod(increment));
  }
  SolverConfig cfg;
  cfg.rho = rho;

  const ConvergenceReport c1 = check_sufficient_decrease(st, cfg);
  const ConvergenceReport c2 = check_vanishing_increments(st);
  std::cout << (c1.pass ? "PASS " : "FAIL ") << c1.summary << "\n";
  std::cout << (c2.pass ? "PASS " : "FAIL ") << c2.summary << "\n";
  return c1.pass && c2.pass ? 0 : kExitNumeric;
}

int cmd_bench(const std::string &size, int blocks) {
  std::size_t nx, ny, nt;
  {
    std::istringstream is(size);
    char c1, c2;
    if (!(is >> nx >> c1 >> ny >> c2 >> nt) || c1 != ',' || c2 != ',')
      throw std::invalid_argument("--size expects nx,ny,nt");
  }
  PhantomSpec spec;
  spec.nx = nx;
  spec.ny = ny;
  spec.nt = nt;
  spec.background_rank = std::min<std::size_t>(3, nt);
  spec.seed = 1;
  const TrainSample sample =
      make_sample(spec, MaskConfig{2.0, 2, 1}, CoilConfig{}, 0.0);
  const LsNetParams params = LsNetParams::init(blocks, 8, 1);

  const auto time_it = [](auto &&fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
  };

  ForwardTape tape;
  LsNetOutput out{{}, {}, {}};
  const double t_fwd = time_it([&] {
    out = lsnet_forward(sample.y, sample.op, params, &tape);
  });
  const MseLoss loss = loss_mse(out.X, sample.x_ref);
  const double t_bwd = time_it([&] {
    (void)lsnet_backward(tape, sample.op, params, loss.grad);
  });
  SolverConfig cfg;
  cfg.max_iter = 1;
  const double t_classical = time_it([&] {
    (void)lps_solve(sample.y, sample.op, cfg);
  });

  std::cout << "operation,seconds\n";
  std::cout << "lsnet_forward," << t_fwd << "\n";
  std::cout << "lsnet_backward," << t_bwd << "\n";
  std::cout << "classical_iteration," << t_classical << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Low-rank plus sparse dynamic image reconstruction"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  auto *gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen->add_option("--spec", spec_path, "key=value spec file")->required();
  gen->add_option("--out", out_dir, "output directory")->required();

  std::string data_dir, train_cfg, out_ckpt, loss_csv;
  auto *tr = app.add_subcommand("train", "Train the unrolled network");
  tr->add_option("--data", data_dir)->required();
  tr->add_option("--config", train_cfg)->required();
  tr->add_option("--out", out_ckpt)->required();
  tr->add_option("--loss-csv", loss_csv);

  std::string y_path, op_path, ckpt, classical_cfg, out_prefix, log_csv;
  auto *rc = app.add_subcommand("recon", "Reconstruct from k-space");
  rc->add_option("--input", y_path)->required();
  rc->add_option("--op", op_path)->required();
  rc->add_option("--ckpt", ckpt);
  rc->add_option("--classical", classical_cfg);
  rc->add_option("--out", out_prefix)->required();
  rc->add_option("--log", log_csv);

  std::string recon_path, ref_path, eval_csv;
  auto *ev = app.add_subcommand("eval", "MSE/PSNR/SSIM report");
  ev->add_option("--recon", recon_path)->required();
  ev->add_option("--ref", ref_path)->required();
  ev->add_option("--out", eval_csv);

  std::string run_csv;
  auto *diag = app.add_subcommand("diagnose-convergence",
                                  "Check solver-run convergence conditions");
  diag->add_option("--run", run_csv)->required();

  std::string bench_size = "16,16,4";
  int bench_blocks = 2;
  auto *bench = app.add_subcommand("bench", "Timing table");
  bench->add_option("--size", bench_size, "nx,ny,nt");
  bench->add_option("--blocks", bench_blocks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen_data(spec_path, out_dir);
    if (tr->parsed())
      return cmd_train(data_dir, train_cfg, out_ckpt, loss_csv);
    if (rc->parsed()) {
      if (ckpt.empty() == classical_cfg.empty()) {
        std::cerr << "recon: exactly one of --ckpt / --classical required\n";
        return kExitUsage;
      }
      return cmd_recon(y_path, op_path, ckpt, classical_cfg, out_prefix,
                       log_csv);
    }
    if (ev->parsed())
      return cmd_eval(recon_path, ref_path, eval_csv);
    if (diag->parsed())
      return cmd_diagnose(run_csv);
    if (bench->parsed())
      return cmd_bench(bench_size, bench_blocks);
  } catch (const DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
