#pragma once

// Independent transcriptions of the reduced Einstein systems, written in
// K = e^{y_1} and the ratios directly. Used only as test oracles.

#include <cmath>
#include <vector>

namespace oracle {

struct State {
    double x;
    std::vector<double> y, yp, ypp;
};

inline double cb(double v) { return std::cbrt(v); }

// generalized Berger: returns {E_y1 (second equation), E_y2, E_y3, trace equation, first integral}
inline std::vector<double> gberger(const State& s) {
    const double x = s.x, w = 1 - x * x;
    const double K = std::exp(s.y[0]), p1 = std::exp(s.y[1]), p2 = std::exp(s.y[2]);
    const double d1 = s.yp[0], d2 = s.yp[1], d3 = s.yp[2];
    const double k = 1.0 / cb(K);
    const double br = 3 - 2 * k * cb(p1 * p1 * p2) - 2 * k * cb(p2 / p1) - 2 * k / cb(p1 * p2 * p2) + k * std::pow(p1, -4.0 / 3) * std::pow(p2, -2.0 / 3) +
                      k * std::pow(p1, 2.0 / 3) * std::pow(p2, -2.0 / 3) + k * std::pow(p1, 2.0 / 3) * std::pow(p2, 4.0 / 3);
    const double trace = s.ypp[0] - (1 + 3 * x * x) / (x * w) * d1 + d1 * d1 / 6 + (d2 * d2 + d2 * d3 + d3 * d3) / 3;
    const double e1 = s.ypp[0] - (5 + 7 * x * x) / (x * w) * d1 + d1 * d1 / 2 + 16 / (w * w) * br;
    const double e2 = s.ypp[1] - 2 * (1 + 2 * x * x) / (x * w) * d2 + d1 * d2 / 2 +
                      32 / (w * w) * k *
                          (std::pow(p1, 2.0 / 3) * std::pow(p2, 1.0 / 3) - std::pow(p1, -1.0 / 3) * std::pow(p2, 1.0 / 3) -
                           std::pow(p1, 2.0 / 3) * std::pow(p2, -2.0 / 3) + std::pow(p1, -4.0 / 3) * std::pow(p2, -2.0 / 3));
    const double e3 = s.ypp[2] - 2 * (1 + 2 * x * x) / (x * w) * d3 + d1 * d3 / 2 +
                      32 / (w * w) * k *
                          (std::pow(p1, -1.0 / 3) * std::pow(p2, 1.0 / 3) - std::pow(p1, -1.0 / 3) * std::pow(p2, -2.0 / 3) -
                           std::pow(p1, 2.0 / 3) * std::pow(p2, 4.0 / 3) + std::pow(p1, 2.0 / 3) * std::pow(p2, -2.0 / 3));
    // 3 * (e1 - trace) with y1'' eliminated
    const double phi = d1 * d1 - (d2 * d2 + d2 * d3 + d3 * d3) - 12 * (1 + x * x) / (x * w) * d1 + 48 / (w * w) * br;
    return {e1, e2, e3, trace, phi};
}

inline std::vector<double> su(int n, const State& s) {
    const double x = s.x, w = 1 - x * x;
    const double K = std::exp(s.y[0]), phi = std::exp(s.y[1]);
    const double d1 = s.yp[0], d2 = s.yp[1];
    const double Kn = std::pow(K, -1.0 / n), pn = std::pow(phi, -1.0 / n);
    const double B = n - (n + 1) * Kn * pn + Kn * std::pow(phi, -(n + 1.0) / n);
    const double trace = s.ypp[0] + (d1 * d1 + (n - 1) * d2 * d2) / (2.0 * n) - (1 + 3 * x * x) / (x * w) * d1;
    const double e1 = s.ypp[0] - (2 * n - 1 + (1 + 2 * n) * x * x) / (x * w) * d1 + d1 * d1 / 2 + 8 * (n - 1) / (w * w) * B;
    const double e2 = s.ypp[1] - ((n - 1) + (1 + n) * x * x) / (x * w) * d2 + d1 * d2 / 2 + 8 * (n + 1) / (w * w) * Kn * pn * (1 / phi - 1);
    const double con = d1 * d1 - d2 * d2 - 4 * n * (1 + x * x) / (x * w) * d1 + 16 * n / (w * w) * B;
    return {e1, e2, trace, con};
}

inline std::vector<double> sp(int n, const State& s) {
    const double x = s.x, w = 1 - x * x;
    const double K = std::exp(s.y[0]), t1 = std::exp(s.y[1]), t2 = std::exp(s.y[2]), t3 = std::exp(s.y[3]);
    const double* d = s.yp.data();
    const double q = n * d[0] * d[0] + std::pow((n - 1) * d[1] - d[2] - d[3], 2) + std::pow(-d[1] + (n - 1) * d[2] - d[3], 2) +
                     std::pow(-d[1] - d[2] + (n - 1) * d[3], 2) + (n - 3) * std::pow(d[1] + d[2] + d[3], 2);
    const double trace = s.ypp[0] - (1 + 3 * x * x) / (x * w) * d[0] + q / (2.0 * n * n);
    const double W = std::pow(t1 * t2 * t3 / K, 1.0 / n), T = t1 * t2 * t3;
    const double S1 = 8 * (n * (n - 1) - W * ((n - 3) * (n + 5) - (n - 3) * (t1 + t2 + t3) + 2 * (2 * t1 * t2 + 2 * t1 * t3 + 2 * t2 * t3 - t1 * t1 - t2 * t2 - t3 * t3) / T));
    const double e1 = s.ypp[0] - (2 * n - 1 + (2 * n + 1) * x * x) / (x * w) * d[0] + d[0] * d[0] / 2 + S1 / (w * w);
    auto ei = [&](int i, double ta, double tb, double tc) {
        return s.ypp[i] - (n - 1 + (n + 1) * x * x) / (x * w) * d[i] + d[0] * d[i] / 2 -
               8 / (w * w) * W * ((n - 1) * ta + 2 * tb + 2 * tc - n - 5 + 2 * (ta * ta - (tb - tc) * (tb - tc)) / T);
    };
    // 2n/(n-1) * (e1 - trace)
    const double con = 2.0 * n / (n - 1) * (e1 - trace);
    return {e1, ei(1, t1, t2, t3), ei(2, t2, t1, t3), ei(3, t3, t1, t2), trace, con};
}

}  // namespace oracle
