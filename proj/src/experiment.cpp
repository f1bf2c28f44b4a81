#include "fedsnn/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <memory>
#include <string>

#include "fedsnn/errors.hpp"
#include "fedsnn/log.hpp"
#include "fedsnn/neuron.hpp"
#include "fedsnn/raster_io.hpp"

namespace fedsnn {

namespace {

constexpr std::uint64_t kTagInit = 0x696E6974;     // init stream
constexpr std::uint64_t kTagSelect = 0x73656C65;   // per-device example selection
constexpr std::uint64_t kTagEncode = 0x656E636F;   // test-set covariate encoding
constexpr std::uint64_t kTagEvalFed = 0x65766C66;  // federated-run evaluation
constexpr std::uint64_t kTagEvalBase = 0x65766C62; // baseline-run evaluation

std::uint64_t eval_seed(std::uint64_t seed, std::uint64_t run_tag, std::size_t round,
                        std::size_t model) {
    return derive_seed(derive_seed(seed, run_tag),
                       static_cast<std::uint64_t>(round) * 4096 + model);
}

std::string fmt_g(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", v);
    return buffer;
}

std::shared_ptr<const Network> build_network(const RunConfig& cfg) {
    return std::make_shared<const Network>(
        NetworkTopology::fully_connected(cfg.n_input, cfg.n_hidden, cfg.n_output),
        make_raised_cosine_basis(cfg.k_basis, cfg.basis_window));
}

struct DatasetBundle {
    std::vector<std::vector<Example>> device_train;
    std::vector<Example> test;
};

DatasetBundle build_datasets(const RunConfig& cfg) {
    DatasetBundle bundle;
    if (cfg.data == DataSource::synthetic) {
        SyntheticSpec spec;
        spec.num_classes = cfg.devices;
        spec.num_input = cfg.n_input;
        spec.s_prime = cfg.s_prime;
        spec.templates = make_block_templates(cfg.devices, cfg.n_input, cfg.template_high,
                                              cfg.template_low);
        spec.noise = cfg.noise;
        spec.train_counts.assign(cfg.devices, cfg.train_per_device);
        spec.test_per_class = cfg.test_per_class;
        SyntheticData data = make_synthetic_noniid(spec, derive_seed(cfg.seed, 0x64617461));
        bundle.device_train = std::move(data.device_train);
        bundle.test = std::move(data.test);
        return bundle;
    }

    for (const std::string& path : cfg.raster_train) {
        RasterDataset dataset = load_raster_file(path);
        if (dataset.num_neurons != cfg.n_input || dataset.num_steps != cfg.s_prime) {
            throw ConfigError("raster train file " + path + " has shape " +
                              std::to_string(dataset.num_neurons) + "x" +
                              std::to_string(dataset.num_steps) + ", config expects " +
                              std::to_string(cfg.n_input) + "x" +
                              std::to_string(cfg.s_prime));
        }
        if (dataset.num_classes > cfg.n_output) {
            throw ConfigError("raster train file " + path + " has more classes than outputs");
        }
        if (dataset.examples.empty()) {
            throw ConfigError("raster train file " + path + " is empty");
        }
        bundle.device_train.push_back(std::move(dataset.examples));
    }
    RasterDataset test = load_raster_file(cfg.raster_test);
    if (test.num_neurons != cfg.n_input || test.num_steps != cfg.s_prime) {
        throw ConfigError("raster test file shape does not match the config");
    }
    if (test.num_classes > cfg.n_output) {
        throw ConfigError("raster test file has more classes than outputs");
    }
    bundle.test = std::move(test.examples);
    return bundle;
}

EncodedExample encode_example(const Example& example, const RunConfig& cfg, RngStream& rng) {
    SpikeRecord inputs = example.raster
                             ? *example.raster
                             : rate_encode(example.covariates, cfg.s_prime, cfg.p_max, rng);
    SpikeRecord targets = encode_target(example.label, cfg.n_output, inputs.num_steps(),
                                        cfg.target, cfg.target_period);
    return EncodedExample{std::move(inputs), std::move(targets)};
}

DeviceData build_device_stream(const std::vector<Example>& train, const RunConfig& cfg,
                               std::size_t device) {
    RngStream rng(derive_seed(cfg.seed, kTagSelect + device));
    std::vector<EncodedExample> sequence;
    sequence.reserve(cfg.d_examples);
    for (std::size_t d = 0; d < cfg.d_examples; ++d) {
        const Example& example = train[rng.uniform_index(train.size())];
        sequence.push_back(encode_example(example, cfg, rng));
    }
    StreamPair stream = concatenate_stream(sequence, cfg.gap);
    return DeviceData{std::move(stream.inputs), std::move(stream.targets)};
}

TestSet encode_test_set(const std::vector<Example>& test, const RunConfig& cfg) {
    RngStream rng(derive_seed(cfg.seed, kTagEncode));
    TestSet set;
    set.examples.reserve(test.size());
    set.labels.reserve(test.size());
    for (const Example& example : test) {
        set.examples.push_back(encode_example(example, cfg, rng));
        set.labels.push_back(example.label);
    }
    return set;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "round,device,learning_signal,test_log_loss,test_accuracy,uploaded_entries\n";
    for (const MetricsRow& row : rows) {
        out << row.round << ',' << row.device << ',' << fmt_g(row.learning_signal) << ','
            << fmt_g(row.test_log_loss) << ',' << fmt_g(row.test_accuracy) << ','
            << row.uploaded_entries << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void write_summary_csv(const std::filesystem::path& path, const ExperimentOutcome& outcome) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    const bool with_baseline = !outcome.baseline_loss.empty();
    const std::size_t devices = outcome.final_per_device.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    out << "device,final_test_accuracy,final_test_log_loss,baseline_test_log_loss,"
           "loss_ratio,uploaded_entries\n";
    for (std::size_t i = 0; i < devices; ++i) {
        out << i << ',' << fmt_g(outcome.final_per_device[i].accuracy) << ','
            << fmt_g(outcome.final_per_device[i].log_loss) << ','
            << fmt_g(with_baseline ? outcome.baseline_loss[i] : nan) << ','
            << fmt_g(with_baseline ? outcome.loss_ratio[i] : nan) << ','
            << outcome.comm.uploaded_total() / devices << '\n';
    }
    double baseline_mean = nan;
    if (with_baseline) {
        baseline_mean = 0.0;
        for (double loss : outcome.baseline_loss) {
            baseline_mean += loss;
        }
        baseline_mean /= static_cast<double>(devices);
    }
    out << -1 << ',' << fmt_g(outcome.final_average_model.accuracy) << ','
        << fmt_g(outcome.final_average_model.log_loss) << ',' << fmt_g(baseline_mean) << ','
        << fmt_g(with_baseline ? outcome.final_average_model.log_loss / baseline_mean : nan)
        << ',' << outcome.comm.uploaded_total() << '\n';
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace

std::size_t argmax_class(std::span<const std::size_t> counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) {
            best = c;
        }
    }
    return best;
}

std::size_t classify(const Network& net, const ModelParams& params,
                     const SpikeRecord& inputs, RngStream& rng) {
    const NetworkTopology& topo = net.topology;
    if (inputs.num_neurons() != topo.num_input) {
        throw DimensionError("classify: input raster row count mismatch");
    }
    const std::size_t num_neurons = topo.num_neurons();
    TraceState traces(topo, net.basis);
    std::vector<std::uint8_t> spikes(num_neurons);
    std::vector<std::size_t> counts(topo.num_output, 0);

    for (std::size_t s = 1; s <= inputs.num_steps(); ++s) {
        for (std::size_t n = 0; n < num_neurons; ++n) {
            if (topo.is_input(n)) {
                spikes[n] = inputs.at(n, s) ? 1 : 0;
            } else {
                const double u = membrane_potential(net, n, params, traces);
                spikes[n] = sample_spike(u, rng) ? 1 : 0;
                if (topo.is_output(n) && spikes[n]) {
                    ++counts[n - topo.first_output()];
                }
            }
        }
        traces.update(net.basis, spikes);
    }
    return argmax_class(counts);
}

EvalResult evaluate_model(const Network& net, const ModelParams& params, const TestSet& test,
                          std::size_t num_samples, std::uint64_t eval_seed_value) {
    RngStream rng(eval_seed_value);
    EvalResult result;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.examples.size(); ++i) {
        const EncodedExample& example = test.examples[i];
        result.log_loss += evaluate_log_loss(net, params, example.inputs, example.targets,
                                             num_samples, rng);
        if (classify(net, params, example.inputs, rng) == test.labels[i]) {
            ++correct;
        }
    }
    const auto count = static_cast<double>(test.examples.size());
    result.log_loss /= count;
    result.accuracy = static_cast<double>(correct) / count;
    return result;
}

RunConfig baseline_variant(RunConfig config) {
    config.tau = config.effective_rounds() + 1;
    config.with_baseline = false;
    config.sparse_rate.reset();
    return config;
}

ExperimentOutcome run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    auto net = build_network(cfg);
    RngStream init_rng(derive_seed(cfg.seed, kTagInit));
    const ModelParams initial = make_initial_params(net->layout, 0.05, init_rng);

    DatasetBundle bundle = build_datasets(cfg);
    std::vector<DeviceData> data;
    std::vector<std::size_t> dataset_sizes;
    data.reserve(cfg.devices);
    for (std::size_t i = 0; i < cfg.devices; ++i) {
        data.push_back(build_device_stream(bundle.device_train[i], cfg, i));
        dataset_sizes.push_back(bundle.device_train[i].size());
    }
    const TestSet test = encode_test_set(bundle.test, cfg);

    const std::size_t rounds = cfg.effective_rounds();
    const std::size_t eval_every = cfg.effective_eval_every();
    FederationConfig fed;
    fed.num_devices = cfg.devices;
    fed.dataset_sizes = dataset_sizes;
    fed.sync_period = cfg.tau;
    fed.total_rounds = rounds;
    fed.topk_rate = cfg.sparse_rate;

    Hyperparams hyper{cfg.alpha, cfg.kappa, cfg.delta_s};

    ExperimentOutcome outcome;
    outcome.final_per_device.resize(cfg.devices);

    auto hook = [&](std::size_t round, const std::vector<Learner>& learners,
                    const CommStats& comm) {
        if (round % eval_every != 0 && round != rounds) {
            return;
        }
        double signal_sum = 0.0;
        std::vector<std::vector<double>> thetas;
        thetas.reserve(learners.size());
        for (std::size_t i = 0; i < learners.size(); ++i) {
            const EvalResult r =
                evaluate_model(*net, learners[i].params(), test, cfg.eval_samples,
                               eval_seed(cfg.seed, kTagEvalFed, round, i));
            signal_sum += learners[i].state().learning_signal;
            outcome.metrics.push_back(MetricsRow{round, static_cast<int>(i),
                                                 learners[i].state().learning_signal,
                                                 r.log_loss, r.accuracy,
                                                 comm.uploaded_total() / learners.size()});
            if (round == rounds) {
                outcome.final_per_device[i] = r;
            }
            thetas.push_back(learners[i].params().theta);
        }
        const ModelParams average{net->layout, fed_average(thetas, dataset_sizes)};
        const EvalResult ra = evaluate_model(*net, average, test, cfg.eval_samples,
                                             eval_seed(cfg.seed, kTagEvalFed, round,
                                                       learners.size()));
        outcome.metrics.push_back(MetricsRow{round, -1,
                                             signal_sum / static_cast<double>(learners.size()),
                                             ra.log_loss, ra.accuracy,
                                             comm.uploaded_total()});
        if (round == rounds) {
            outcome.final_average_model = ra;
        }
    };

    log_debug("training " + std::to_string(cfg.devices) + " devices for " +
              std::to_string(rounds) + " rounds");
    TrainingResult result = run_federated_training(net, fed, hyper, initial, data, cfg.seed,
                                                   hook);
    outcome.comm = result.comm;

    outcome.mean_accuracy = 0.0;
    outcome.mean_log_loss = 0.0;
    for (const EvalResult& r : outcome.final_per_device) {
        outcome.mean_accuracy += r.accuracy;
        outcome.mean_log_loss += r.log_loss;
    }
    outcome.mean_accuracy /= static_cast<double>(cfg.devices);
    outcome.mean_log_loss /= static_cast<double>(cfg.devices);
    outcome.mean_loss_ratio = std::numeric_limits<double>::quiet_NaN();

    if (cfg.with_baseline) {
        log_debug("training separate baseline");
        FederationConfig base = fed;
        base.sync_period = rounds + 1; // never syncs
        base.topk_rate.reset();
        TrainingResult baseline = run_federated_training(net, base, hyper, initial, data,
                                                         cfg.seed, {});
        outcome.baseline.resize(cfg.devices);
        outcome.baseline_loss.resize(cfg.devices);
        outcome.loss_ratio.resize(cfg.devices);
        outcome.mean_loss_ratio = 0.0;
        for (std::size_t i = 0; i < cfg.devices; ++i) {
            const EvalResult r =
                evaluate_model(*net, baseline.device_params[i], test, cfg.eval_samples,
                               eval_seed(cfg.seed, kTagEvalBase, rounds, i));
            outcome.baseline[i] = r;
            outcome.baseline_loss[i] = r.log_loss;
            outcome.loss_ratio[i] = outcome.final_per_device[i].log_loss / r.log_loss;
            outcome.mean_loss_ratio += outcome.loss_ratio[i];
        }
        outcome.mean_loss_ratio /= static_cast<double>(cfg.devices);
    }

    write_metrics_csv(out_dir / "metrics.csv", outcome.metrics);
    write_summary_csv(out_dir / "summary.csv", outcome);
    return outcome;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, SweepKey key,
                                const std::vector<double>& values,
                                const std::filesystem::path& out_dir, bool parallel) {
    if (values.empty()) {
        throw ConfigError("sweep: no values given");
    }
    std::vector<RunConfig> configs;
    std::vector<std::filesystem::path> dirs;
    for (double value : values) {
        RunConfig point = cfg;
        std::string name;
        if (key == SweepKey::tau) {
            const auto tau = static_cast<std::size_t>(value);
            if (static_cast<double>(tau) != value || tau == 0) {
                throw ConfigError("sweep: tau values must be positive integers");
            }
            point.tau = tau;
            name = "tau_" + std::to_string(tau);
        } else {
            point.sparse_rate = value;
            name = "rate_" + fmt_g(value);
        }
        point.validate();
        configs.push_back(std::move(point));
        dirs.push_back(out_dir / name);
    }

    std::vector<ExperimentOutcome> outcomes(configs.size());
    if (parallel && configs.size() > 1) {
        std::vector<std::future<ExperimentOutcome>> futures;
        futures.reserve(configs.size());
        for (std::size_t i = 0; i < configs.size(); ++i) {
            futures.push_back(std::async(std::launch::async, run_experiment, configs[i],
                                         dirs[i]));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) {
            outcomes[i] = futures[i].get();
        }
    } else {
        for (std::size_t i = 0; i < configs.size(); ++i) {
            outcomes[i] = run_experiment(configs[i], dirs[i]);
        }
    }

    std::vector<SweepRow> rows;
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "sweep_summary.csv", std::ios::trunc);
    if (!out) {
        throw IoError("cannot open sweep_summary.csv for writing");
    }
    out << "value,mean_final_accuracy,mean_final_log_loss,mean_final_loss_ratio,"
           "total_uploaded_entries\n";
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const ExperimentOutcome& o = outcomes[i];
        SweepRow row{values[i], o.mean_accuracy, o.mean_log_loss, o.mean_loss_ratio,
                     o.comm.uploaded_total()};
        out << fmt_g(row.value) << ',' << fmt_g(row.mean_final_accuracy) << ','
            << fmt_g(row.mean_final_log_loss) << ',' << fmt_g(row.mean_final_loss_ratio)
            << ',' << row.total_uploaded_entries << '\n';
        rows.push_back(row);
    }
    if (!out) {
        throw IoError("write failed for sweep_summary.csv");
    }
    return rows;
}

void generate_dataset_files(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    if (cfg.data != DataSource::synthetic) {
        throw ConfigError("gen-data: config must use synthetic data");
    }
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    DatasetBundle bundle = build_datasets(cfg);

    for (std::size_t i = 0; i < bundle.device_train.size(); ++i) {
        RasterDataset dataset;
        dataset.num_neurons = cfg.n_input;
        dataset.num_steps = cfg.s_prime;
        dataset.num_classes = cfg.devices;
        dataset.examples = std::move(bundle.device_train[i]);
        save_raster_file(dataset, out_dir / ("train_device" + std::to_string(i) + ".sras"));
    }
    RasterDataset test;
    test.num_neurons = cfg.n_input;
    test.num_steps = cfg.s_prime;
    test.num_classes = cfg.devices;
    test.examples = std::move(bundle.test);
    save_raster_file(test, out_dir / "test.sras");
    log_info("wrote " + std::to_string(bundle.device_train.size()) +
             " train files and test.sras to " + out_dir.string());
}

} // namespace fedsnn
