#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hcap/estimates.hpp"
#include "hcap/ma_solver.hpp"
#include "hcap/surface_spec.hpp"

namespace hcap::report {

/// Fixed-column CSV of curvature reports at the given points:
/// x1,x2,u,w,nu_vertical,kappa1,kappa2,kappa_euc1,kappa_euc2,K_ext,H_trace,
/// H_mean,R_scalar,K_intrinsic
std::string curvature_csv(const HalfspaceGraph& graph, std::span<const SamplePoint> points);

/// Fixed-column CSV of ball forms:
/// s,t,E,F,G,L,M,N,K_intrinsic,H_mean,rho,rho_u,rho_v,rho_uu,rho_uv,rho_vv
std::string ball_forms_csv(const BallPatch& patch, std::span<const SamplePoint> points);

/// Long-format identity residual table (family,x1,x2,key,value). Slack keys
/// pass when >= -1e-10, residual keys when <= 1e-8; worst_violation reports
/// the largest excess over those gates (<= 0 means all pass).
std::string identities_csv(const SurfaceSpec& spec, std::uint64_t seed, int point_count,
                           double* worst_violation);

/// Solution grid as x1,x2,u rows over the active nodes.
std::string solution_csv(const GridSolution& sol);

nlohmann::json continuation_json(const ContinuationResult& result);

nlohmann::json estimate_report_json(const EstimateReport& rep);
std::string estimate_report_csv(const EstimateReport& rep);

/// Write with trailing newline, creating parent directories.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::vector<SamplePoint> sample_disc(double radius, std::uint64_t seed, int count);
std::vector<SamplePoint> sample_rect(std::array<double, 2> s_range,
                                     std::array<double, 2> t_range, std::uint64_t seed,
                                     int count);

}  // namespace hcap::report
