#include "glyset/classifier.hpp"

#include "glyset/errors.hpp"
#include "glyset/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>

namespace glyset::classifier {

namespace {

double sign_of(BinaryClass c) { return c == BinaryClass::UD ? 1.0 : -1.0; }

// log(1 + exp(t)) without overflow.
double log1pexp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double dot_row(const features::FeatureMatrix& x, size_t row, const std::vector<double>& w) {
    double z = 0.0;
    const double* base = x.data.data() + row * x.cols();
    for (size_t c = 0; c < w.size(); ++c) z += base[c] * w[c];
    return z;
}

void check_rows_finite(const features::FeatureMatrix& x, const std::vector<size_t>& rows) {
    for (size_t r : rows) {
        if (r >= x.rows()) throw Error("train_lr: row index out of range");
        for (size_t c = 0; c < x.cols(); ++c) {
            if (!std::isfinite(x.at(r, c))) {
                throw Error("non-finite feature value at row " + x.row_ids[r] +
                            ", column " + x.column_names[c]);
            }
        }
    }
}

} // namespace

double lr_objective(const features::FeatureMatrix& x, const std::vector<size_t>& rows,
                    const std::vector<BinaryClass>& y, double c,
                    const std::vector<double>& w, double b) {
    double obj = 0.0;
    for (double wi : w) obj += 0.5 * wi * wi;
    for (size_t r : rows) {
        double margin = sign_of(y[r]) * (dot_row(x, r, w) + b);
        obj += c * log1pexp(-margin);
    }
    return obj;
}

void lr_gradient(const features::FeatureMatrix& x, const std::vector<size_t>& rows,
                 const std::vector<BinaryClass>& y, double c,
                 const std::vector<double>& w, double b,
                 std::vector<double>& grad_w, double& grad_b) {
    grad_w = w; // d/dw of the L2 term
    grad_b = 0.0;
    for (size_t r : rows) {
        double yy = sign_of(y[r]);
        double z = dot_row(x, r, w) + b;
        double coef = -c * yy * sigmoid(-yy * z);
        const double* base = x.data.data() + r * x.cols();
        for (size_t col = 0; col < w.size(); ++col) grad_w[col] += coef * base[col];
        grad_b += coef;
    }
}

TrainedClassifier train_lr(const features::FeatureMatrix& x,
                           const std::vector<size_t>& train_rows,
                           const std::vector<BinaryClass>& y, double c,
                           const LrOptions& opts) {
    if (train_rows.empty()) throw Error("train_lr: no training rows");
    if (y.size() != x.rows()) throw Error("train_lr: label count mismatch");
    if (c <= 0.0) throw Error("train_lr: C must be positive");
    check_rows_finite(x, train_rows);
    bool saw_ud = false, saw_hd = false;
    for (size_t r : train_rows) (y[r] == BinaryClass::UD ? saw_ud : saw_hd) = true;
    if (!saw_ud || !saw_hd) throw Error("train_lr: training labels cover a single class");

    const size_t d = x.cols();
    const size_t np = d + 1; // parameters: weights then bias
    std::vector<double> theta(np, 0.0);

    auto objective = [&](const std::vector<double>& t) {
        std::vector<double> w(t.begin(), t.begin() + d);
        return lr_objective(x, train_rows, y, c, w, t[d]);
    };
    auto gradient = [&](const std::vector<double>& t, std::vector<double>& g) {
        std::vector<double> w(t.begin(), t.begin() + d);
        std::vector<double> gw;
        double gb;
        lr_gradient(x, train_rows, y, c, w, t[d], gw, gb);
        g.assign(gw.begin(), gw.end());
        g.push_back(gb);
    };

    const size_t memory = 10;
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    std::vector<double> grad(np), new_grad(np);
    gradient(theta, grad);
    double f = objective(theta);

    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        if (inf_norm(grad) < opts.tol) break;

        // Two-loop recursion for the search direction -H*grad.
        std::vector<double> q = grad;
        std::vector<double> alpha(s_hist.size());
        for (size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * dot(s_hist[i], q);
            for (size_t k = 0; k < np; ++k) q[k] -= alpha[i] * y_hist[i][k];
        }
        if (!s_hist.empty()) {
            double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double& e : q) e *= gamma;
        }
        for (size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * dot(y_hist[i], q);
            for (size_t k = 0; k < np; ++k) q[k] += (alpha[i] - beta) * s_hist[i][k];
        }
        std::vector<double> dir(np);
        for (size_t k = 0; k < np; ++k) dir[k] = -q[k];

        double dir_deriv = dot(grad, dir);
        if (dir_deriv >= 0.0) {
            // History produced a non-descent direction; fall back to
            // steepest descent.
            for (size_t k = 0; k < np; ++k) dir[k] = -grad[k];
            dir_deriv = -dot(grad, grad);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // Armijo backtracking.
        double step = 1.0;
        double new_f = f;
        std::vector<double> new_theta(np);
        bool accepted = false;
        while (step > 1e-20) {
            for (size_t k = 0; k < np; ++k) new_theta[k] = theta[k] + step * dir[k];
            new_f = objective(new_theta);
            if (new_f <= f + 1e-4 * step * dir_deriv) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // cannot make progress at machine precision

        gradient(new_theta, new_grad);
        std::vector<double> s(np), dy(np);
        for (size_t k = 0; k < np; ++k) {
            s[k] = new_theta[k] - theta[k];
            dy[k] = new_grad[k] - grad[k];
        }
        double sy = dot(s, dy);
        if (sy > 1e-12 * std::sqrt(dot(s, s)) * std::sqrt(dot(dy, dy))) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(dy));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta = std::move(new_theta);
        grad = new_grad;
        f = new_f;
    }
    if (iter == opts.max_iters && inf_norm(grad) >= opts.tol) {
        log::warn("logistic regression stopped at max_iters with gradient norm " +
                  std::to_string(inf_norm(grad)));
    }

    TrainedClassifier m;
    m.weights.assign(theta.begin(), theta.begin() + d);
    m.bias = theta[d];
    m.C = c;
    m.columns = x.column_names;
    return m;
}

std::vector<double> predict_proba(const TrainedClassifier& m,
                                  const features::FeatureMatrix& x) {
    if (m.weights.size() != x.cols()) throw Error("predict_proba: column count mismatch");
    std::vector<double> out(x.rows());
    for (size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(dot_row(x, r, m.weights) + m.bias);
    return out;
}

std::vector<BinaryClass> predict(const TrainedClassifier& m,
                                 const features::FeatureMatrix& x) {
    auto probs = predict_proba(m, x);
    std::vector<BinaryClass> out(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        out[i] = probs[i] >= m.threshold ? BinaryClass::UD : BinaryClass::HD;
    }
    return out;
}

void save_model(const TrainedClassifier& m, const std::filesystem::path& path) {
    nlohmann::json j;
    j["weights"] = m.weights;
    j["bias"] = m.bias;
    j["C"] = m.C;
    j["threshold"] = m.threshold;
    j["columns"] = m.columns;
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

TrainedClassifier load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid model JSON in " + path.string() + ": " + e.what());
    }
    TrainedClassifier m;
    try {
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.C = j.at("C").get<double>();
        m.threshold = j.at("threshold").get<double>();
        m.columns = j.at("columns").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid model JSON in " + path.string() + ": " + e.what());
    }
    if (m.columns.size() != m.weights.size()) {
        throw Error("model column names do not match weight count");
    }
    if (!(m.C > 0.0)) throw Error("model C must be positive");
    if (!(m.threshold >= 0.45 && m.threshold <= 0.55)) {
        throw Error("model threshold outside [0.45, 0.55]");
    }
    return m;
}

} // namespace glyset::classifier
