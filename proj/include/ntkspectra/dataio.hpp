#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ntkspectra/csv.hpp"
#include "ntkspectra/linalg.hpp"
#include "ntkspectra/rng.hpp"

namespace ntkspectra {

struct Dataset {
    Matrix x;  // n x d, unit-norm rows
    Vector y;
    std::string name;
    std::string provenance;
};

struct DataCheckReport {
    std::vector<long> unit_norm_violations;
    std::vector<std::pair<long, long>> parallel_pairs;  // |cos angle| >= 1 - 1e-12
    double min_pairwise_angle = 0.0;
    double lipschitz_estimate = 0.0;  // max |y_i - y_j| / ||x_i - x_j||
    std::vector<std::pair<long, long>> near_duplicate_pairs;  // angle < threshold
};

// Labels are y = cos(frequency * (direction . x)) with a fixed unit direction,
// so the Lipschitz constant is at most `frequency`; with linear_labels they
// are y = direction . x (Lipschitz 1). With align_pairs, duplicates rotate
// toward the label direction's tangent component instead of a random one, so
// the label difference across a pair is ~ L_y * angle instead of carrying a
// random direction factor.
struct SyntheticSpec {
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    std::uint64_t seed = 0;
    double frequency = 1.0;
    std::vector<std::pair<long, double>> near_dup_pairs;  // (count, angle)
    double near_dup_threshold = 0.05;  // reporting threshold, radians
    bool linear_labels = false;
    bool align_pairs = false;
};

inline Dataset generate_sphere_dataset(const SyntheticSpec& spec) {
    if (spec.n < 2 || spec.d < 2) throw InvalidSpecError("generate_sphere_dataset: need n >= 2, d >= 2");
    long total_pairs = 0;
    for (const auto& [count, angle] : spec.near_dup_pairs) {
        if (count < 0 || !(angle > 0.0) || angle >= M_PI)
            throw InvalidSpecError("generate_sphere_dataset: pair angles must be in (0, pi)");
        total_pairs += count;
    }
    if (total_pairs > spec.n / 2)
        throw InvalidSpecError("generate_sphere_dataset: injected pairs exceed n/2");
    if (!(spec.frequency > 0.0))
        throw InvalidSpecError("generate_sphere_dataset: frequency must be positive");

    const Eigen::Index n_base = spec.n - total_pairs;

    RandomStream base_rng(spec.seed, 0);
    Matrix x(spec.n, spec.d);
    for (Eigen::Index i = 0; i < n_base; ++i) {
        for (Eigen::Index j = 0; j < spec.d; ++j) x(i, j) = base_rng.next_gaussian();
        x.row(i).normalize();
    }

    RandomStream dir_rng(spec.seed, 2);
    Vector w(spec.d);
    for (Eigen::Index j = 0; j < spec.d; ++j) w(j) = dir_rng.next_gaussian();
    w.normalize();

    // Each duplicate is its base point rotated by exactly the requested angle
    // within a tangent-plane direction: random by default, or the label
    // direction's tangent component when align_pairs is set.
    RandomStream pair_rng(spec.seed, 1);
    Eigen::Index next = n_base;
    long pair_index = 0;
    for (const auto& [count, angle] : spec.near_dup_pairs) {
        for (long k = 0; k < count; ++k, ++pair_index) {
            const Eigen::Index base = pair_index % n_base;
            Vector u(spec.d);
            if (spec.align_pairs) u = w;
            else
                for (Eigen::Index j = 0; j < spec.d; ++j) u(j) = pair_rng.next_gaussian();
            u -= u.dot(x.row(base)) * x.row(base).transpose();
            if (u.norm() < 1e-9) {  // base parallel to the label direction
                for (Eigen::Index j = 0; j < spec.d; ++j) u(j) = pair_rng.next_gaussian();
                u -= u.dot(x.row(base)) * x.row(base).transpose();
            }
            u.normalize();
            x.row(next) = std::cos(angle) * x.row(base) + std::sin(angle) * u.transpose();
            x.row(next).normalize();
            ++next;
        }
    }

    Dataset ds;
    ds.x = std::move(x);
    ds.y.resize(spec.n);
    for (Eigen::Index i = 0; i < spec.n; ++i)
        ds.y(i) = spec.linear_labels ? ds.x.row(i).dot(w)
                                     : std::cos(spec.frequency * ds.x.row(i).dot(w));
    ds.name = "synthetic-sphere";
    ds.provenance = "synthetic(n=" + std::to_string(spec.n) + ",d=" + std::to_string(spec.d) +
                    ",seed=" + std::to_string(spec.seed) + ")";
    return ds;
}

// Dataset CSV: header feature_0,...,feature_{d-1},label.
inline void save_dataset_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open for writing: " + path);
    for (Eigen::Index j = 0; j < ds.x.cols(); ++j) out << "feature_" << j << ',';
    out << "label\n";
    for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.x.cols(); ++j) out << format_double(ds.x(i, j)) << ',';
        out << format_double(ds.y(i)) << '\n';
    }
}

inline Dataset load_csv(const std::string& path, bool normalize) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path, 0, 0);
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header.back().find("label") == std::string::npos)
        throw ParseError("expected header ending in 'label'", 1, static_cast<long>(header.size()));
    const Eigen::Index d = static_cast<Eigen::Index>(header.size()) - 1;

    std::vector<std::vector<double>> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (static_cast<Eigen::Index>(cells.size()) != d + 1)
            throw ParseError("expected " + std::to_string(d + 1) + " cells", lineno, 1);
        std::vector<double> row;
        for (std::size_t c = 0; c < cells.size(); ++c)
            row.push_back(parse_double(cells[c], lineno, static_cast<long>(c) + 1));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw ParseError("need at least 2 samples: " + path, lineno, 1);

    Dataset ds;
    ds.x.resize(static_cast<Eigen::Index>(rows.size()), d);
    ds.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Eigen::Index j = 0; j < d; ++j)
            ds.x(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
        ds.y(static_cast<Eigen::Index>(i)) = rows[i].back();
        if (normalize) {
            const double norm = ds.x.row(static_cast<Eigen::Index>(i)).norm();
            if (norm < 1e-12) throw ZeroVectorRowError("cannot normalize zero row", static_cast<long>(i));
            ds.x.row(static_cast<Eigen::Index>(i)) /= norm;
        }
    }
    ds.name = path;
    ds.provenance = "file:" + path;
    return ds;
}

// Exhaustive pairwise scan for the three data assumptions: unit-norm inputs,
// non-degeneracy (no parallel pair), and the empirical Lipschitz constant of
// the labels. Parallel pairs are excluded from the Lipschitz ratio.
inline DataCheckReport check_assumptions(const Dataset& ds, double near_dup_threshold = 0.05) {
    const Eigen::Index n = ds.x.rows();
    if (n < 2) throw InvalidSizeError("check_assumptions: need n >= 2");
    DataCheckReport rep;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(ds.x.row(i).norm() - 1.0) > 1e-8)
            rep.unit_norm_violations.push_back(static_cast<long>(i));
    }
    double min_angle = M_PI;
    double max_ratio = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double cosang = std::clamp(ds.x.row(i).dot(ds.x.row(j)), -1.0, 1.0);
            const double angle = std::acos(cosang);
            min_angle = std::min(min_angle, angle);
            if (std::abs(cosang) >= 1.0 - 1e-12)
                rep.parallel_pairs.emplace_back(static_cast<long>(i), static_cast<long>(j));
            if (angle < near_dup_threshold)
                rep.near_duplicate_pairs.emplace_back(static_cast<long>(i), static_cast<long>(j));
            const double dist = (ds.x.row(i) - ds.x.row(j)).norm();
            if (dist > 1e-12)
                max_ratio = std::max(max_ratio, std::abs(ds.y(i) - ds.y(j)) / dist);
        }
    }
    rep.min_pairwise_angle = min_angle;
    rep.lipschitz_estimate = max_ratio;
    return rep;
}

// Uniform index sampling without replacement, deterministic per (seed, batch).
inline std::vector<std::vector<Eigen::Index>> make_batches(Eigen::Index n, Eigen::Index batch_size,
                                                           long num_batches, std::uint64_t seed) {
    if (batch_size < 1 || batch_size > n)
        throw InvalidSizeError("make_batches: batch_size out of range");
    if (num_batches < 1) throw InvalidSizeError("make_batches: need num_batches >= 1");
    std::vector<std::vector<Eigen::Index>> batches;
    batches.reserve(static_cast<std::size_t>(num_batches));
    for (long b = 0; b < num_batches; ++b) {
        RandomStream rng(seed, static_cast<std::uint64_t>(b));
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        // Partial Fisher-Yates: only the first batch_size slots are needed.
        for (Eigen::Index i = 0; i < batch_size; ++i) {
            const auto span = static_cast<std::uint64_t>(n - i);
            const auto j = i + static_cast<Eigen::Index>(rng.next_u64() % span);
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        idx.resize(static_cast<std::size_t>(batch_size));
        batches.push_back(std::move(idx));
    }
    return batches;
}

}  // namespace ntkspectra
