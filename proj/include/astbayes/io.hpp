#pragma once

// Plain-text file formats. Every table is comma-delimited with a fixed header row.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "astbayes/ast.hpp"
#include "astbayes/diagnostics.hpp"
#include "astbayes/nu_prior.hpp"
#include "astbayes/sim_study.hpp"

namespace astbayes::io {

namespace fs = std::filesystem;

/// One value per line, optional single non-numeric header on line 1, blank lines
/// ignored. With log_transform every value must be strictly positive.
Sample parse_sample(std::string_view text, bool log_transform);
Sample ingest(const fs::path& path, bool log_transform);

std::string format_sample(const Sample& s);

// header: parameter,mean,median,ci_low,ci_high
std::string format_summary(const PosteriorSummary& s);
// header: iter,alpha,mu,sigma,nu
std::string format_trace(const Trace& t);
Trace parse_trace(std::string_view text);
// header: grid,density
std::string format_predictive(const PredictiveDensity& d);
// header: nu,kl_neighbor,unnormalized_mass,mass
std::string format_prior_table(const NuPriorTable& t);
// header: nu_true,alpha,n,rel_rmse,coverage,ci_low_med,ci_high_med
std::string format_sim_results(std::span<const SimCellResult> results);

/// Study grid from key = value lines (# comments). List keys take comma-separated
/// values and the grid is their Cartesian product:
///   nu, alpha, n                         (lists, required)
///   mu, sigma, replications,
///   iterations, burn_in, thin             (scalars, optional)
std::vector<SimCellSpec> parse_grid_config(std::string_view text);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);

}  // namespace astbayes::io
