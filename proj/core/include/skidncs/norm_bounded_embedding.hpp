#pragma once

#include "skidncs/ncs_discretization.hpp"

namespace skidncs {

/// Exact polynomial decomposition of the h-dependence of the lifted
/// matrices. With M(h) = [A~(h) - A~(h_nom) | B~(h) - B~(h_nom)],
///
///   M(h) = (h - h_nom) * M1 + (h^2 - h_nom^2) * M2
///
/// holds identically on the admissible interval, because every block of
/// the lifted pair is a polynomial of degree <= 2 in h. r1 and r2 are the
/// ranges of the two scalar coordinates over the interval.
struct DeviationGenerators {
    Mat M1;  // 5x7
    Mat M2;  // 5x7
    double h_nom = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
};

DeviationGenerators deviation_generators(const LiftedSystem& sys);

/// Norm-bounded rewrite of the delay-parametric family:
///
///   xi_{k+1} = A_nom xi_k + B_nom du_k + B_D d_k + B_p p_k
///   p_k      = Delta_k q_k,     |Delta_k| < 1
///   q_k      = C_q xi_k + D_q du_k
///
/// Delta(h) is block-scalar: alpha_1(h) I on the r1 channel and
/// alpha_2(h) I on the r2 channel. Channels with zero radius or zero
/// generator are dropped, so the degenerate tau_min = tau_max case
/// collapses to the certain system.
struct NormBoundedModel {
    Mat A_nom;  // 5x5, lifted pair at h_nom
    Mat B_nom;  // 5x2
    Mat B_D;    // 5x2, h-independent, never part of the channel
    Mat B_p;    // 5 x n_p
    Mat C_q;    // n_q x 5
    Mat D_q;    // n_q x 2
    double h_nom = 0.0;
    Vec2 radii{0.0, 0.0};  // (r1, r2)
    double margin = 0.0;
    int rank1 = 0;  // channel width of the (h - h_nom) generator
    int rank2 = 0;  // channel width of the (h^2 - h_nom^2) generator

    int channel_dim() const { return rank1 + rank2; }
};

/// Factor the deviation generators through thin SVDs into (B_p, C_q, D_q).
/// The radii are inflated by (1 + margin) so the certified contraction is
/// strict: |Delta(h)| <= 1/(1 + margin) < 1 on the whole interval.
NormBoundedModel build_embedding(const LiftedSystem& sys, double margin = 1e-6);

/// The structured contraction realizing the hold interval h.
Mat delta_for_hold(const NormBoundedModel& nb, double h);

struct CertificationReport {
    double max_residual = 0.0;    // worst reconstruction error over the grid
    double max_delta_norm = 0.0;  // worst |Delta(h)| over the grid
    int grid_points = 0;
    bool passed = false;
};

/// Grid check that the embedding reproduces the lifted pair with a strict
/// contraction: pass iff residual < 1e-10 and max |Delta| < 1.
CertificationReport certify_embedding(const NormBoundedModel& nb, const LiftedSystem& sys,
                                      int grid_points);

/// One step of the uncertain recursion for an arbitrary contraction Delta.
/// Throws if |Delta| exceeds 1.
LiftedState uncertain_step(const NormBoundedModel& nb, const LiftedState& xi,
                           const Vec2& du, const SlipDeviation& d, const Mat& Delta);

}  // namespace skidncs
