#ifndef VOXC_CLI_HPP
#define VOXC_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "voxc/checkpoint.hpp"
#include "voxc/dataset.hpp"
#include "voxc/metrics.hpp"
#include "voxc/obj_export.hpp"
#include "voxc/primitives.hpp"
#include "voxc/train.hpp"

namespace voxc::cli {

struct UsageError : Error {
    using Error::Error;
};

/// Parsed command: exactly one subcommand with its typed flag values.
struct Command {
    std::string kind;

    // gen-data
    std::string classes;
    std::size_t per_class = 5;
    std::size_t views = 8;
    std::uint32_t res = 30;
    std::uint32_t depth_size = 64;
    double elevation = 20.0;
    int holdout = -1;
    std::string test_out;

    // training
    std::string data_path;
    std::string ae_path;
    std::string model_path;
    std::string out_path;
    TrainConfig train;
    std::string loss_name = "bce";
    int threads = 0;

    // eval / predict / export / bench
    double threshold = 0.5;
    std::size_t index = 0;
    std::size_t reps = 50;

    std::uint64_t seed = 0;
};

namespace detail {

inline void add_train_flags(CLI::App* sub, Command& cmd, double default_lr,
                            std::size_t default_epochs, std::size_t default_batch) {
    cmd.train.learning_rate = default_lr;
    cmd.train.epochs = default_epochs;
    cmd.train.batch_size = default_batch;
    sub->add_option("--epochs", cmd.train.epochs, "training epochs");
    sub->add_option("--batch", cmd.train.batch_size, "mini-batch size");
    sub->add_option("--lr", cmd.train.learning_rate, "learning rate");
    sub->add_option("--momentum", cmd.train.momentum, "SGD momentum");
    sub->add_option("--ramp-epochs", cmd.train.ramp_epochs,
                    "epochs over which the unoccupied-voxel weight ramps to 1");
    sub->add_option("--smin", cmd.train.s_min, "floor for the imbalance ratio");
    sub->add_option("--loss", cmd.loss_name, "loss kind: bce or squared")
        ->check(CLI::IsMember({"bce", "squared"}));
    sub->add_option("--seed", cmd.seed, "random seed");
    sub->add_option("--threads", cmd.threads, "worker threads (0 = library default)");
}

inline LossKind loss_from_name(const std::string& name) {
    return name == "squared" ? LossKind::squared_error : LossKind::weighted_bce;
}

}  // namespace detail

/// argv excludes the program name. Throws UsageError for anything CLI11
/// rejects; --help short-circuits with kind == "help".
inline Command parse_args(const std::vector<std::string>& argv) {
    Command cmd;
    CLI::App app{"single-depth-view 3D object completion"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-data", "generate a procedural sample store");
    gen->add_option("--classes", cmd.classes,
                    "comma list of shape kinds (box,icosphere,cylinder,composite); "
                    "repeats make distinct classes")
        ->required();
    gen->add_option("--per-class", cmd.per_class, "meshes per class");
    gen->add_option("--views", cmd.views, "viewpoints per mesh (45deg ring has 8)");
    gen->add_option("--res", cmd.res, "voxel resolution (30 or 10)");
    gen->add_option("--depth-size", cmd.depth_size, "depth map side in pixels");
    gen->add_option("--elevation", cmd.elevation, "camera elevation in degrees");
    gen->add_option("--seed", cmd.seed, "random seed");
    gen->add_option("--holdout", cmd.holdout, "class id to split into --test-out");
    gen->add_option("--test-out", cmd.test_out, "path for the holdout store");
    gen->add_option("--out", cmd.out_path, "output .voxc path")->required();

    auto* trainae = app.add_subcommand("train-ae", "train the sub-region auto-encoder");
    trainae->add_option("--data", cmd.data_path, "training .voxc store (R = 30)")
        ->required();
    trainae->add_option("--out", cmd.out_path, "output .voxw checkpoint")->required();
    detail::add_train_flags(trainae, cmd, 0.5, 500, 32);

    auto* train = app.add_subcommand("train", "train the stacked completion model");
    train->add_option("--data", cmd.data_path, "training .voxc store (R = 30)")
        ->required();
    train->add_option("--ae", cmd.ae_path, "pre-trained auto-encoder .voxw")->required();
    train->add_option("--out", cmd.out_path, "output .voxw checkpoint")->required();
    train->add_option("--freeze-epochs", cmd.train.freeze_epochs,
                      "epochs before the decompression layer unfreezes");
    detail::add_train_flags(train, cmd, 0.1, 450, 16);

    auto* lowres = app.add_subcommand("train-lowres", "train the 10^3 direct model");
    lowres->add_option("--data", cmd.data_path, "training .voxc store (R = 10)")
        ->required();
    lowres->add_option("--out", cmd.out_path, "output .voxw checkpoint")->required();
    detail::add_train_flags(lowres, cmd, 0.1, 300, 16);

    auto* ft = app.add_subcommand("finetune", "continue training on a second store");
    ft->add_option("--model", cmd.model_path, "checkpoint to continue from")->required();
    ft->add_option("--data", cmd.data_path, "fine-tuning .voxc store")->required();
    ft->add_option("--out", cmd.out_path, "output .voxw checkpoint")->required();
    ft->add_option("--freeze-epochs", cmd.train.freeze_epochs,
                   "absolute epoch before which the decoder stays frozen");
    detail::add_train_flags(ft, cmd, 0.02, 150, 16);

    auto* ev = app.add_subcommand("eval", "evaluate a model on a store");
    ev->add_option("--model", cmd.model_path, "model checkpoint")->required();
    ev->add_option("--data", cmd.data_path, "evaluation store")->required();
    ev->add_option("--threshold", cmd.threshold, "occupancy threshold");
    ev->add_option("--threads", cmd.threads, "worker threads");

    auto* pred = app.add_subcommand("predict", "reconstruct one sample to OBJ");
    pred->add_option("--model", cmd.model_path, "model checkpoint")->required();
    pred->add_option("--data", cmd.data_path, "store with the input depth map")
        ->required();
    pred->add_option("--index", cmd.index, "record index");
    pred->add_option("--threshold", cmd.threshold, "occupancy threshold");
    pred->add_option("--out", cmd.out_path, "output .obj path")->required();

    auto* ex = app.add_subcommand("export", "export a store target grid to OBJ");
    ex->add_option("--data", cmd.data_path, "sample store")->required();
    ex->add_option("--index", cmd.index, "record index");
    ex->add_option("--out", cmd.out_path, "output .obj path")->required();

    auto* summary = app.add_subcommand("summary", "print model parameter summary");
    summary->add_option("--model", cmd.model_path, "model checkpoint")->required();

    auto* bench = app.add_subcommand("bench", "time depth-map -> grid reconstruction");
    bench->add_option("--model", cmd.model_path, "model checkpoint")->required();
    bench->add_option("--reps", cmd.reps, "timed repetitions (>= 10)");
    bench->add_option("--seed", cmd.seed, "input seed");
    bench->add_option("--threads", cmd.threads, "worker threads");

    std::vector<const char*> argp;
    argp.push_back("voxc");
    for (const auto& a : argv) argp.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argp.size()), argp.data());
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help() << std::flush;
        cmd.kind = "help";
        return cmd;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    for (auto* sub : app.get_subcommands()) cmd.kind = sub->get_name();
    cmd.train.seed = cmd.seed;
    cmd.train.loss = detail::loss_from_name(cmd.loss_name);
    return cmd;
}

namespace detail {

inline void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

inline std::vector<PrimitiveKind> parse_class_list(const std::string& classes) {
    std::vector<PrimitiveKind> kinds;
    std::string token;
    std::istringstream in(classes);
    while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        kinds.push_back(primitive_kind_from_name(token));
    }
    if (kinds.empty()) throw ArgumentError("gen-data: no classes given");
    return kinds;
}

inline void print_history_line(const EpochInfo& info) {
    std::cout << "epoch " << info.epoch << " loss " << std::setprecision(6)
              << std::fixed << info.loss << " w " << info.weight << "\n";
}

inline int run_gen_data(const Command& cmd) {
    auto kinds = parse_class_list(cmd.classes);
    std::vector<ClassedMesh> meshes;
    for (std::size_t c = 0; c < kinds.size(); ++c) {
        for (std::size_t i = 0; i < cmd.per_class; ++i) {
            ClassedMesh cm;
            cm.mesh = random_primitive(kinds[c], mix_seed(cmd.seed, c * 100003 + i));
            cm.class_id = static_cast<std::uint16_t>(c);
            meshes.push_back(std::move(cm));
        }
    }
    auto result = build_dataset(meshes, static_cast<std::uint32_t>(cmd.views), cmd.res,
                                cmd.depth_size, cmd.seed, cmd.elevation);
    if (result.skipped > 0) {
        std::cerr << "warning: skipped " << result.skipped << " degenerate meshes\n";
    }
    if (cmd.holdout >= 0) {
        if (cmd.test_out.empty()) {
            throw ArgumentError("gen-data: --holdout requires --test-out");
        }
        auto [train_store, test_store] =
            split_holdout(result.store, static_cast<std::uint16_t>(cmd.holdout));
        write_store(cmd.out_path, train_store);
        write_store(cmd.test_out, test_store);
        std::cout << "wrote " << train_store.records.size() << " train records to "
                  << cmd.out_path << ", " << test_store.records.size()
                  << " holdout records to " << cmd.test_out << "\n";
    } else {
        write_store(cmd.out_path, result.store);
        std::cout << "wrote " << result.store.records.size() << " records to "
                  << cmd.out_path << "\n";
    }
    return 0;
}

inline int run_train_ae(const Command& cmd) {
    apply_threads(cmd.threads);
    auto store = read_store(cmd.data_path);
    auto blocks = build_subregion_store(store);
    auto result = train_autoencoder(blocks, cmd.train, print_history_line);
    write_checkpoint(cmd.out_path,
                     make_checkpoint(result.params,
                                     static_cast<std::uint32_t>(cmd.train.epochs),
                                     cmd.train.seed));
    std::cout << "final loss " << result.history.loss.back() << ", wrote "
              << cmd.out_path << "\n";
    return 0;
}

inline int run_train(const Command& cmd) {
    apply_threads(cmd.threads);
    auto store = read_store(cmd.data_path);
    auto ae = autoencoder_from_checkpoint(read_checkpoint(cmd.ae_path));
    TrainConfig cfg = cmd.train;
    cfg.model_variant = ModelVariant::high_res_stacked;
    auto result = train_completion(
        store, ae, cfg,
        [](const EpochInfo& info, const CompletionNet<float>&) {
            print_history_line(info);
        });
    write_checkpoint(cmd.out_path,
                     make_checkpoint(result.model, &result.opt,
                                     static_cast<std::uint32_t>(result.end_epoch),
                                     cfg.seed));
    std::cout << "final loss " << result.history.loss.back() << ", wrote "
              << cmd.out_path << "\n";
    return 0;
}

inline int run_train_lowres(const Command& cmd) {
    apply_threads(cmd.threads);
    auto store = read_store(cmd.data_path);
    TrainConfig cfg = cmd.train;
    cfg.model_variant = ModelVariant::low_res_direct;
    auto result = train_low_res(store, cfg,
                                [](const EpochInfo& info, const CompletionNet<float>&) {
                                    print_history_line(info);
                                });
    write_checkpoint(cmd.out_path,
                     make_checkpoint(result.model, &result.opt,
                                     static_cast<std::uint32_t>(result.end_epoch),
                                     cfg.seed));
    std::cout << "final loss " << result.history.loss.back() << ", wrote "
              << cmd.out_path << "\n";
    return 0;
}

inline int run_finetune(const Command& cmd) {
    apply_threads(cmd.threads);
    auto store = read_store(cmd.data_path);
    auto restored = model_from_checkpoint(read_checkpoint(cmd.model_path));
    TrainConfig cfg = cmd.train;
    cfg.model_variant = restored.model.variant();
    SgdOptimizer<float> opt(restored.model.params(), cfg.learning_rate, cfg.momentum);
    opt.velocity() = std::move(restored.velocity);
    auto history = finetune(restored.model, opt, restored.epoch, store, cfg,
                            [](const EpochInfo& info, const CompletionNet<float>&) {
                                print_history_line(info);
                            });
    std::uint32_t end_epoch = restored.epoch + static_cast<std::uint32_t>(cfg.epochs);
    write_checkpoint(cmd.out_path,
                     make_checkpoint(restored.model, &opt, end_epoch, cfg.seed));
    if (!history.loss.empty()) std::cout << "final loss " << history.loss.back() << ", ";
    std::cout << "wrote " << cmd.out_path << "\n";
    return 0;
}

inline int run_eval(const Command& cmd) {
    apply_threads(cmd.threads);
    auto store = read_store(cmd.data_path);
    auto restored = model_from_checkpoint(read_checkpoint(cmd.model_path));
    auto report = evaluate(restored.model, store, cmd.threshold);
    std::cout << report_text(report);
    return 0;
}

inline int run_predict(const Command& cmd) {
    auto store = read_store(cmd.data_path);
    auto restored = model_from_checkpoint(read_checkpoint(cmd.model_path));
    if (cmd.index >= store.records.size()) {
        throw ArgumentError("predict: index " + std::to_string(cmd.index) +
                            " out of range, store has " +
                            std::to_string(store.records.size()) + " records");
    }
    if (store.depth_width != restored.model.depth_size() ||
        store.depth_height != restored.model.depth_size()) {
        throw ResolutionError("predict: store depth size does not match the model");
    }
    const auto& rec = store.records[cmd.index];
    Tensor<float> input({1, store.depth_height, store.depth_width});
    input.data = rec.depth.values;
    const auto& probs = restored.model.forward(input);
    auto grid = threshold_grid(probs, restored.model.target_resolution(), cmd.threshold);
    export_obj(cmd.out_path, grid);
    std::cout << "wrote " << grid.occupied_count() << " voxels to " << cmd.out_path
              << "\n";
    return 0;
}

inline int run_export(const Command& cmd) {
    auto store = read_store(cmd.data_path);
    if (cmd.index >= store.records.size()) {
        throw ArgumentError("export: index " + std::to_string(cmd.index) +
                            " out of range, store has " +
                            std::to_string(store.records.size()) + " records");
    }
    export_obj(cmd.out_path, store.records[cmd.index].target);
    std::cout << "wrote " << store.records[cmd.index].target.occupied_count()
              << " voxels to " << cmd.out_path << "\n";
    return 0;
}

inline int run_summary(const Command& cmd) {
    auto ckpt = read_checkpoint(cmd.model_path);
    std::cout << "variant " << model_variant_name(ckpt.variant) << "\n";
    std::cout << "epoch " << ckpt.epoch << "\n";
    std::cout << "seed " << ckpt.seed << "\n";
    std::size_t total = 0;
    for (const auto& t : ckpt.tensors) {
        std::size_t n = t.data.size();
        total += n;
        std::cout << t.name << " [";
        for (std::size_t i = 0; i < t.shape.size(); ++i) {
            if (i) std::cout << "x";
            std::cout << t.shape[i];
        }
        std::cout << "] " << n << (t.trainable ? "" : " (frozen)") << "\n";
    }
    std::cout << "total_parameters " << total << "\n";
    if (ckpt.variant == ModelVariant::high_res_stacked ||
        ckpt.variant == ModelVariant::auto_encoder) {
        std::cout << "compression_ratio " << compression_ratio(kCodeDim) << "\n";
    }
    return 0;
}

inline int run_bench(const Command& cmd) {
    apply_threads(cmd.threads);
    if (cmd.reps < 10) throw ArgumentError("bench: repetitions must be >= 10");
    auto restored = model_from_checkpoint(read_checkpoint(cmd.model_path));
    auto& model = restored.model;
    Rng rng(cmd.seed);
    Tensor<float> input({1, model.depth_size(), model.depth_size()});
    for (auto& v : input.data) v = static_cast<float>(rng.uniform(0.0, 1.0));

    using Clock = std::chrono::steady_clock;
    for (int i = 0; i < 3; ++i) model.forward(input);  // warm-up
    std::vector<double> total, conv, head, decode;
    for (std::size_t i = 0; i < cmd.reps; ++i) {
        auto staged = model.template forward_staged<Clock>(input);
        conv.push_back(staged.conv_ms);
        head.push_back(staged.head_ms);
        decode.push_back(staged.decode_ms);
        total.push_back(staged.conv_ms + staged.head_ms + staged.decode_ms);
    }
    auto quantile = [](std::vector<double> v, double q) {
        std::sort(v.begin(), v.end());
        std::size_t idx = static_cast<std::size_t>(q * (v.size() - 1) + 0.5);
        return v[std::min(idx, v.size() - 1)];
    };
    std::cout << std::fixed << std::setprecision(3);
    std::cout << "reps " << cmd.reps << "\n";
    std::cout << "median_ms " << quantile(total, 0.5) << "\n";
    std::cout << "p95_ms " << quantile(total, 0.95) << "\n";
    std::cout << "conv_median_ms " << quantile(conv, 0.5) << "\n";
    std::cout << "head_median_ms " << quantile(head, 0.5) << "\n";
    std::cout << "decode_median_ms " << quantile(decode, 0.5) << "\n";
    return 0;
}

}  // namespace detail

/// Runs a parsed command. Returns the process exit code for success paths;
/// errors propagate as exceptions.
inline int execute(const Command& cmd) {
    if (cmd.kind == "help") return 0;
    if (cmd.kind == "gen-data") return detail::run_gen_data(cmd);
    if (cmd.kind == "train-ae") return detail::run_train_ae(cmd);
    if (cmd.kind == "train") return detail::run_train(cmd);
    if (cmd.kind == "train-lowres") return detail::run_train_lowres(cmd);
    if (cmd.kind == "finetune") return detail::run_finetune(cmd);
    if (cmd.kind == "eval") return detail::run_eval(cmd);
    if (cmd.kind == "predict") return detail::run_predict(cmd);
    if (cmd.kind == "export") return detail::run_export(cmd);
    if (cmd.kind == "summary") return detail::run_summary(cmd);
    if (cmd.kind == "bench") return detail::run_bench(cmd);
    throw UsageError("unknown subcommand '" + cmd.kind + "'");
}

/// Exit codes: 0 success, 1 runtime/data error, 2 usage error.
inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        Command cmd = parse_args(args);
        return execute(cmd);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace voxc::cli

#endif  // VOXC_CLI_HPP
