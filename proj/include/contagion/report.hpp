#pragma once

#include <span>
#include <string>

#include "contagion/config.hpp"
#include "contagion/ensemble.hpp"

namespace contagion {

// CSV schema: f_or_q,crisis_F,crisis_F_shadow,crisis_F_regulated,baseline_b,baseline_c
// Baseline columns are empty where a sweep has no such curve (q sweeps).
std::string sweep_to_csv(const SweepResult& sweep);
std::string ensemble_to_csv(double value, const EnsembleResult& result);

// JSON summary: config echo, per-point crisis statistics, R(q) curves where
// defined (null where F(0)=0 makes them undefined), full histograms.
std::string sweep_to_json(const RunSpec& spec, const SweepResult& sweep);
std::string ensemble_to_json(const RunSpec& spec, double value, const EnsembleResult& result);

std::string run_spec_json(const RunSpec& spec); // config echo used by the manifest

// Edge list: header "# N=<n> classes=<csv of S/R> layers=<csv>", then
// creditor_index,debtor_index,weight lines.
std::string network_to_edge_list(const WeightedNetwork& network);

// CSV with columns bank,class,a,l,e,c,b,d,gamma.
std::string sheets_to_csv(std::span<const BalanceSheet> sheets,
                          std::span<const BankClass> classes);

} // namespace contagion
