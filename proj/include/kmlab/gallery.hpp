#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kmlab/models.hpp"
#include "kmlab/solvers.hpp"

namespace kmlab {

enum class ConvergenceMode { Weak, Setwise, TotalVariation };

/// One counterexample instance: the approximating model (model_n), the limit
/// model (model_true), the analytic policies, and symbolic closed forms in
/// (beta, n). Two families of closed forms are kept side by side:
/// "exact" evaluators reproduce the delta-start values the solvers compute;
/// "paper" evaluators reproduce the values printed in the source analysis,
/// which in places count the t=0 stage differently (or, for setwise_cont,
/// contain an arithmetic slip). Keys present per entry:
///   j_opt_n       optimal cost under model_n
///   j_opt_true    optimal cost under model_true
///   j_cross       cost of design_policy applied to model_true
///   loss          j_cross - j_opt_true
struct GalleryEntry {
    std::string name;
    int n = 2;
    RegionModel model_n;       // the incorrect / approximating kernel
    RegionModel model_true;    // the limit kernel
    RegionPolicy design_policy;   // gamma_n^*: optimal for model_n
    RegionPolicy true_policy;     // gamma^*: optimal for model_true
    ConvergenceMode convergence_mode = ConvergenceMode::Weak;

    using Form = std::function<double(double beta, int n)>;
    std::map<std::string, Form> closed_form_exact;
    std::map<std::string, Form> closed_form_paper;

    double exact(const std::string& key, double beta) const;
    double paper(const std::string& key, double beta) const;
};

/// Partially observed weak-convergence discontinuity: state bounces on {-1,1}
/// (or collapses inward through +-(1-1/n) to 0), uniform uninformative
/// channel, tracking cost, prior at 1. The paper-optimal policy is open-loop:
/// u_0 = 1, u_t = 0 afterwards.
GalleryEntry make_weak_pomdp(int n, double beta = 0.5);

/// Fully observed variant on the same kernels with the action grid {-1, 1}.
GalleryEntry make_weak_fully(int n, double beta = 0.5);

/// Fully observed weak-convergence robustness failure on [0,2] with actions
/// {0,1,2}: the design policy parks in the 1 +- 1/n band where u=2 costs 3.
GalleryEntry make_robust_weak(int n, double beta = 0.5);

/// Setwise continuity failure driven by the square-wave densities f_n; n even.
GalleryEntry make_setwise_cont(int n, double beta = 0.5);

/// Setwise robustness failure with action-dependent square-wave kernels; n even.
GalleryEntry make_setwise_robust(int n, double beta = 0.5);

/// Names of all gallery constructors, in presentation order.
std::vector<std::string> gallery_names();
GalleryEntry make_gallery_entry(const std::string& name, int n, double beta = 0.5);

/// Closed-form evaluation without building the models (usable for asymptote
/// columns at huge n). Throws on unknown entry/key.
double gallery_form_exact(const std::string& entry, const std::string& key, double beta, int n);
double gallery_form_paper(const std::string& entry, const std::string& key, double beta, int n);
bool gallery_has_paper_form(const std::string& entry, const std::string& key);

/// Additive-noise family x' = f(x,u) + w used by the learning experiments.
AdditiveNoiseModel make_additive_noise(std::vector<PiecewisePoly> drift, Measure1D noise,
                                       std::vector<double> action_values, double state_lo,
                                       double state_hi);

// ---------------------------------------------------------- square-wave tools

/// Left intervals L_{n,k} = [(2k-2)/(2n), (2k-1)/(2n)), k = 1..n.
std::vector<std::pair<double, double>> square_wave_left(int n);
/// Right intervals R_{n,k} = [(2k-1)/(2n), k/n), k = 1..n.
std::vector<std::pair<double, double>> square_wave_right(int n);
/// f_n: density 2 on the left intervals.
Measure1D square_wave_density(int n);
/// g_n: density 2 on the right intervals.
Measure1D square_wave_density_complement(int n);
/// The dyadic prefix family {[0, j/(2n)) : j = 1..2n} on which the setwise gap
/// of (f_n, U[0,1]) is exactly 1/(2n).
std::vector<std::pair<double, double>> dyadic_prefix_family(int n);

} // namespace kmlab
