#include "skidncs/norm_bounded_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skidncs {

DeviationGenerators deviation_generators(const LiftedSystem& sys) {
    const Mat& B = sys.model.B;
    const Mat AB = sys.model.A * B;

    // A~(h) carries the tail integral over [h, Ts], B~(h) the head over
    // [0, h]; differentiating both against h_nom leaves +/-B on the linear
    // coordinate and -/+AB/2 on the quadratic one.
    DeviationGenerators gen;
    gen.M1 = Mat(5, 7);
    gen.M1.set_block(0, 3, -B);
    gen.M1.set_block(0, 5, B);
    gen.M2 = Mat(5, 7);
    gen.M2.set_block(0, 3, AB * -0.5);
    gen.M2.set_block(0, 5, AB * 0.5);

    const double h_lo = sys.bounds.hold_min();
    const double h_hi = sys.bounds.hold_max();
    gen.h_nom = sys.bounds.sample_time_Ts - (sys.bounds.tau_min + sys.bounds.tau_max) / 2.0;
    gen.r1 = std::max(std::abs(h_lo - gen.h_nom), std::abs(h_hi - gen.h_nom));
    // h >= 0, so h^2 is monotone and its range is attained at the endpoints.
    gen.r2 = std::max(std::abs(h_lo * h_lo - gen.h_nom * gen.h_nom),
                      std::abs(h_hi * h_hi - gen.h_nom * gen.h_nom));
    return gen;
}

NormBoundedModel build_embedding(const LiftedSystem& sys, double margin) {
    if (!(margin >= 0.0)) {
        throw std::invalid_argument("build_embedding: margin must be >= 0");
    }
    const DeviationGenerators gen = deviation_generators(sys);

    NormBoundedModel nb;
    nb.h_nom = gen.h_nom;
    nb.radii = Vec2{gen.r1, gen.r2};
    nb.margin = margin;

    const LiftedMatrices nominal = lifted_matrices(sys, gen.h_nom);
    nb.A_nom = nominal.A_tilde;
    nb.B_nom = nominal.B_tilde;
    nb.B_D = nominal.B_tilde_D;

    Mat b_p(5, 0);
    Mat w(0, 7);
    int ranks[2] = {0, 0};
    const double radius[2] = {gen.r1, gen.r2};
    const Mat* generator[2] = {&gen.M1, &gen.M2};
    for (int i = 0; i < 2; ++i) {
        if (radius[i] == 0.0) continue;
        const ThinSvd svd = thin_svd(*generator[i] * radius[i], 1e-12);
        const int rank = static_cast<int>(svd.s.size());
        if (rank == 0) continue;

        Mat us = svd.U;
        for (int c = 0; c < rank; ++c)
            for (int r = 0; r < 5; ++r) us(r, c) *= svd.s[static_cast<size_t>(c)];
        b_p = Mat::hconcat(b_p, us * (1.0 + margin));
        w = Mat::vconcat(w, svd.V.transposed());
        ranks[i] = rank;
    }
    nb.rank1 = ranks[0];
    nb.rank2 = ranks[1];
    nb.B_p = b_p;
    nb.C_q = w.block(0, 0, w.rows(), 5);
    nb.D_q = w.block(0, 5, w.rows(), 2);
    return nb;
}

Mat delta_for_hold(const NormBoundedModel& nb, double h) {
    const int n = nb.channel_dim();
    Mat delta(n, n);
    const double inflate = 1.0 + nb.margin;
    if (nb.rank1 > 0) {
        const double alpha1 = (h - nb.h_nom) / (nb.radii[0] * inflate);
        for (int i = 0; i < nb.rank1; ++i) delta(i, i) = alpha1;
    }
    if (nb.rank2 > 0) {
        const double alpha2 = (h * h - nb.h_nom * nb.h_nom) / (nb.radii[1] * inflate);
        for (int i = 0; i < nb.rank2; ++i) {
            delta(nb.rank1 + i, nb.rank1 + i) = alpha2;
        }
    }
    return delta;
}

CertificationReport certify_embedding(const NormBoundedModel& nb, const LiftedSystem& sys,
                                      int grid_points) {
    if (grid_points < 2) {
        throw std::invalid_argument("certify_embedding: need at least 2 grid points");
    }
    const double h_lo = sys.bounds.hold_min();
    const double h_hi = sys.bounds.hold_max();

    CertificationReport report;
    report.grid_points = grid_points;
    for (int i = 0; i < grid_points; ++i) {
        const double h =
            h_lo + (h_hi - h_lo) * static_cast<double>(i) / (grid_points - 1);
        const LiftedMatrices exact = lifted_matrices(sys, h);
        const Mat delta = delta_for_hold(nb, h);

        Mat rec_a = nb.A_nom;
        Mat rec_b = nb.B_nom;
        if (nb.channel_dim() > 0) {
            const Mat bp_delta = nb.B_p * delta;
            rec_a = rec_a + bp_delta * nb.C_q;
            rec_b = rec_b + bp_delta * nb.D_q;
            report.max_delta_norm = std::max(report.max_delta_norm, spectral_norm(delta));
        }
        const double residual = std::max((exact.A_tilde - rec_a).max_abs(),
                                         (exact.B_tilde - rec_b).max_abs());
        report.max_residual = std::max(report.max_residual, residual);
    }
    report.passed = report.max_residual < 1e-10 && report.max_delta_norm < 1.0;
    return report;
}

LiftedState uncertain_step(const NormBoundedModel& nb, const LiftedState& xi,
                           const Vec2& du, const SlipDeviation& d, const Mat& Delta) {
    const int n = nb.channel_dim();
    if (Delta.rows() != n || Delta.cols() != n) {
        throw std::invalid_argument("uncertain_step: Delta has the wrong shape");
    }
    const Mat xiv = to_vector(xi);
    const Mat duv = Mat::column({du[0], du[1]});
    const Mat dv = Mat::column({d.d_mu_r, d.d_mu_l});

    Mat next = nb.A_nom * xiv + nb.B_nom * duv + nb.B_D * dv;
    if (n > 0) {
        if (spectral_norm(Delta) > 1.0) {
            throw std::invalid_argument("uncertain_step: |Delta| exceeds 1");
        }
        const Mat q = nb.C_q * xiv + nb.D_q * duv;
        next = next + nb.B_p * (Delta * q);
    }
    return lifted_state_from(next);
}

}  // namespace skidncs
