#pragma once

#include <cstdint>
#include <vector>

#include "fedce/types.hpp"

namespace fedce {

// 2|P∩G| / (|P|+|G|); both masks empty -> 1 by convention.
double dice_coefficient(const std::vector<uint8_t>& pred_mask,
                        const std::vector<uint8_t>& gt_mask);

// Continued-fraction regularized incomplete beta I_x(a,b), tolerance 1e-12.
double regularized_incomplete_beta(double x, double a, double b);

// CDF of Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

struct PearsonResult {
  double r = 0.0;
  double p_value = 1.0;
};

// Sample Pearson r with a two-tailed p-value from
// t = r*sqrt((n-2)/(1-r^2)) against the t distribution with n-2 dof.
// Requires n >= 3 and nonzero variance in both arguments.
PearsonResult pearson(const Vec& x, const Vec& y);

// Two-tailed p-value for a given (r, n) pair.
double pearson_p_value(double r, int n);

double euclidean(const Vec& x, const Vec& y);
double cosine_sim(const Vec& x, const Vec& y);

// Population standard deviation across clients. Requires n >= 2.
double client_std(const Vec& scores);

struct FairnessReport {
  Vec client_scores;              // per-client test score of the method
  double mean_score = 0.0;
  double std_dev = 0.0;           // population std across clients
  double pearson_r = 0.0;         // vs the standalone reference vector
  double p_value = 1.0;
  double euclidean_distance = 0.0;
  double cosine_similarity = 0.0;
};

FairnessReport build_fairness_report(const Vec& method_scores, const Vec& standalone_scores);

}  // namespace fedce
