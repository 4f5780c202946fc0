// cli.hpp - command-line interface: train, predict, eval-cv, bounds-curve.
//
// run_cli is the whole program minus process glue, so tests can drive it
// in-process with captured streams. Exit codes: 0 success, 1 usage error,
// 2 data error, 3 solver error.
#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mrc/dataset.hpp"
#include "mrc/error.hpp"
#include "mrc/eval.hpp"
#include "mrc/io.hpp"
#include "mrc/predict.hpp"

namespace mrc::cli {

namespace detail {

struct DataArgs {
    std::string path;
    std::string label_col;
    std::string delimiter = ",";
};

inline void add_data_flags(CLI::App* cmd, DataArgs& args, bool label_required) {
    cmd->add_option("--data", args.path, "input CSV with a header row")->required();
    auto* label = cmd->add_option("--label-col", args.label_col, "label column name or 0-based index");
    if (label_required) label->required();
    cmd->add_option("--delimiter", args.delimiter, "field delimiter (default ,)");
}

inline char delimiter_char(const DataArgs& args) {
    if (args.delimiter.size() != 1)
        throw Error("delimiter must be a single character");
    return args.delimiter[0];
}

struct FitArgs {
    double lambda = 0.25;
    double delta = 0.0;
    bool has_delta = false;
    std::string mode = "interval";
    std::size_t max_thresholds = 0;
};

inline void add_fit_flags(CLI::App* cmd, FitArgs& args) {
    auto* lam = cmd->add_option("--lambda", args.lambda,
                                "uniform expectation-interval width (default 0.25)");
    auto* del = cmd->add_option("--delta", args.delta,
                                "confidence level: derive widths from the feature ranges");
    lam->excludes(del);
    del->excludes(lam);
    del->each([&args](const std::string&) { args.has_delta = true; });
    cmd->add_option("--mode", args.mode, "interval | point (default interval)")
        ->check(CLI::IsMember({"interval", "point"}));
    cmd->add_option("--max-thresholds", args.max_thresholds,
                    "threshold budget (default floor(200/|Y|))");
}

inline TrainOptions to_train_options(const FitArgs& args, bool lower) {
    TrainOptions opts;
    opts.mode = args.mode == "point" ? EstimateMode::Point : EstimateMode::Interval;
    opts.lambda = args.lambda;
    if (args.has_delta) opts.delta = args.delta;
    opts.max_thresholds = args.max_thresholds;
    opts.compute_lower_bound = lower;
    return opts;
}

inline void warn_single_class(const Dataset& data, std::ostream& err) {
    if (data.num_labels() == 1)
        err << "warning: the label column has a single class\n";
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"minimax-risk classification toolkit"};
    app.require_subcommand(1);

    // train
    detail::DataArgs train_data;
    detail::FitArgs train_fit;
    bool train_lower = false;
    std::string train_out;
    CLI::App* train = app.add_subcommand("train", "fit a model and report its risk bounds");
    detail::add_data_flags(train, train_data, true);
    detail::add_fit_flags(train, train_fit);
    train->add_flag("--lower-bound", train_lower, "also compute the lower risk bound");
    train->add_option("--out", train_out, "write the fitted model to this path");

    // predict
    std::string predict_model_path, predict_out;
    detail::DataArgs predict_data;
    bool predict_deterministic = false;
    std::uint64_t predict_seed = 0;
    CLI::App* predict = app.add_subcommand("predict", "label instances with a saved model");
    predict->add_option("--model", predict_model_path, "model file from train --out")->required();
    detail::add_data_flags(predict, predict_data, false);
    predict->add_flag("--deterministic", predict_deterministic, "argmax labels instead of sampling");
    predict->add_option("--seed", predict_seed, "sampling seed (default 0)");
    predict->add_option("--out", predict_out, "write predictions CSV here instead of stdout");

    // eval-cv
    detail::DataArgs cv_data;
    detail::FitArgs cv_fit;
    std::size_t cv_folds = 10;
    std::uint64_t cv_seed = 0;
    bool cv_deterministic = false;
    std::string cv_out;
    CLI::App* evalcv = app.add_subcommand("eval-cv", "stratified cross-validation with risk bounds");
    detail::add_data_flags(evalcv, cv_data, true);
    detail::add_fit_flags(evalcv, cv_fit);
    evalcv->add_option("--folds", cv_folds, "number of folds (default 10)");
    evalcv->add_option("--seed", cv_seed, "fold-assignment and sampling seed (default 0)");
    evalcv->add_flag("--deterministic", cv_deterministic, "argmax labels instead of sampling");
    evalcv->add_option("--out", cv_out, "write per-fold errors CSV here");

    // bounds-curve
    detail::DataArgs curve_data;
    detail::FitArgs curve_fit;
    std::vector<std::size_t> curve_sizes;
    std::string curve_out;
    std::uint64_t curve_seed = 0;
    bool curve_deterministic = false;
    CLI::App* curve = app.add_subcommand("bounds-curve", "risk bounds versus training size");
    detail::add_data_flags(curve, curve_data, true);
    detail::add_fit_flags(curve, curve_fit);
    curve->add_option("--sizes", curve_sizes, "comma-separated training sizes, e.g. 100,500,1000")
        ->delimiter(',')
        ->required();
    curve->add_option("--seed", curve_seed, "subsampling and prediction seed (default 0)");
    curve->add_flag("--deterministic", curve_deterministic, "argmax labels instead of sampling");
    curve->add_option("--out", curve_out, "write the curve CSV here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*train) {
            Dataset data = load_csv(train_data.path, train_data.label_col,
                                    detail::delimiter_char(train_data));
            detail::warn_single_class(data, err);
            MrcModel model = train_model(data, detail::to_train_options(train_fit, train_lower));
            out << "samples: " << data.num_rows << "\n";
            out << "features: " << model.feature_map.feature_count() << "\n";
            out << "upper_bound: " << format_g9(model.upper_bound) << "\n";
            if (model.lower_bound) out << "lower_bound: " << format_g9(*model.lower_bound) << "\n";
            if (!train_out.empty()) {
                save_model(ModelFile::from_model(model, data.label_names), train_out);
                out << "model written: " << train_out << "\n";
            }
        } else if (*predict) {
            ModelFile mf = load_model(predict_model_path);
            FeatureMap fm = mf.feature_map();
            char delim = detail::delimiter_char(predict_data);

            // With --label-col the column is stripped from the features and
            // used to report an error rate; without it the file is all features.
            std::vector<std::vector<double>> rows;
            std::vector<std::string> true_names;
            bool have_labels = !predict_data.label_col.empty();
            if (have_labels) {
                Dataset data = load_csv(predict_data.path, predict_data.label_col, delim);
                for (std::size_t i = 0; i < data.num_rows; ++i) {
                    auto x = data.instance(i);
                    rows.emplace_back(x.begin(), x.end());
                    true_names.push_back(
                        data.label_names[static_cast<std::size_t>(data.labels[i])]);
                }
            } else {
                rows = load_feature_csv(predict_data.path, delim);
            }

            std::size_t needed = 0;
            for (const ThresholdSpec& t : mf.thresholds)
                needed = std::max(needed, t.dimension + 1);
            if (!rows.empty() && rows.front().size() < needed)
                throw Error("model references feature column " + std::to_string(needed - 1) +
                            " but the input has only " + std::to_string(rows.front().size()) +
                            " feature columns");

            std::ostringstream csv;
            csv << "prediction";
            for (const std::string& name : mf.label_names)
                csv << "," << mrc::detail::csv_escape("p_" + name, ',');
            csv << "\n";
            std::size_t wrong = 0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                Prediction p = predict_proba(fm, mf.mu, mf.nu,
                                             std::span<const double>(rows[i]));
                int label = predict_deterministic
                                ? p.label
                                : sample_label(p.probabilities, SampleDraw{predict_seed, i});
                const std::string& got = mf.label_names[static_cast<std::size_t>(label)];
                csv << mrc::detail::csv_escape(got, ',');
                for (double prob : p.probabilities) csv << "," << format_g9(prob);
                csv << "\n";
                if (have_labels && got != true_names[i]) ++wrong;
            }
            if (!predict_out.empty()) {
                std::ofstream f(predict_out, std::ios::binary);
                if (!f) throw Error("cannot write '" + predict_out + "'");
                f << csv.str();
            } else {
                out << csv.str();
            }
            if (have_labels)
                err << "error: "
                    << format_g9(static_cast<double>(wrong) / static_cast<double>(rows.size()))
                    << "\n";
        } else if (*evalcv) {
            Dataset data = load_csv(cv_data.path, cv_data.label_col,
                                    detail::delimiter_char(cv_data));
            detail::warn_single_class(data, err);
            CvReport report = evaluate_cv(
                data, detail::to_train_options(cv_fit, true), cv_folds, cv_seed,
                cv_deterministic ? PredictionMode::Deterministic : PredictionMode::Sampled);
            out << "folds: " << cv_folds << "\n";
            out << "seed: " << cv_seed << "\n";
            out << "error_mean: " << format_g9(report.mean_error) << "\n";
            out << "error_std: " << format_g9(report.std_error) << "\n";
            out << "lower_bound: " << format_g9(report.lower_bound_full) << "\n";
            out << "upper_bound: " << format_g9(report.upper_bound_full) << "\n";
            if (!cv_out.empty()) {
                std::ofstream f(cv_out, std::ios::binary);
                if (!f) throw Error("cannot write '" + cv_out + "'");
                write_cv_report_csv(report, f);
            }
        } else if (*curve) {
            Dataset data = load_csv(curve_data.path, curve_data.label_col,
                                    detail::delimiter_char(curve_data));
            detail::warn_single_class(data, err);
            BoundsCurve bc = bounds_curve(
                data, curve_sizes, detail::to_train_options(curve_fit, true), curve_seed,
                curve_deterministic ? PredictionMode::Deterministic : PredictionMode::Sampled);
            if (!curve_out.empty()) {
                std::ofstream f(curve_out, std::ios::binary);
                if (!f) throw Error("cannot write '" + curve_out + "'");
                write_bounds_curve_csv(bc, f);
                out << "curve written: " << curve_out << "\n";
            } else {
                write_bounds_curve_csv(bc, out);
            }
        }
    } catch (const NumericalBreakdown& e) {
        err << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const UncertaintySetEmpty& e) {
        err << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace mrc::cli
