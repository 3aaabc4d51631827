#pragma once

// JSON and CSV renderings of result types. JSON comes back as compact text
// so the JSON library stays private to the core.

#include <cstdint>
#include <string>
#include <vector>

#include "cpoly/bridge_lab.hpp"
#include "cpoly/ldp_lab.hpp"
#include "cpoly/partition.hpp"
#include "cpoly/single_site.hpp"

namespace cpoly {

/// Library version string.
const char* version();

std::string to_json(const PartitionEstimate& e);
std::string to_json(const LadderResult& r);
std::string to_json(const CriticalScan& s);
std::string to_json(const BetaCPrediction& p);
std::string to_json(const SingleSiteTable& t);
std::string to_json(const BoundReport& r);
std::string to_json(const GreenConstants& g);
std::string to_json(const std::vector<ExpectedQ>& series);
std::string to_json(const QHistogram& h);
std::string to_json(const QMoments& m);
std::string to_json(const TailEstimate& t);
std::string to_json(const RateCurve& c);
std::string to_json(const WsawResult& r);
std::string to_json(const VaradhanReport& r);
std::string to_json(const RangeProbe& p);
std::string to_json(const ExpansionProbe& p);
std::string to_json(const BridgeSeries& s);
std::string to_json(const BallotReport& r);
std::string to_json(const ConditionalQSeries& s);
std::string to_json(const SiltTailSeries& s);
/// SAW counts c_0..c_N with the c_n^{1/n} trend.
std::string saw_counts_json(int dim, const std::vector<std::uint64_t>& counts);

// CSV tables with a header row.
std::string to_csv(const LadderResult& r);    // n,a_n,a_n_error,method,ess,excluded,confinement_a_n
std::string to_csv(const CriticalScan& s);    // delta,beta_lo,beta_hi,beta_hat,resolved,probes
std::string to_csv(const std::vector<ExpectedQ>& series);  // n,value,ratio
std::string to_csv(const QHistogram& h);      // q,count,bridge_count
std::string to_csv(const RateCurve& c);       // t,n,estimate,std_error,method,lower_bounded_only,bridge_upper
std::string to_csv(const WsawResult& r);      // kind,n,a_n,std_error,exact,ess
std::string to_csv(const RangeProbe& p);      // s,probability,exponent,std_error,one_sided,trimmed_probability,trimmed_exponent
std::string to_csv(const ExpansionProbe& p);  // u,n,gap,gap_error
std::string to_csv(const BridgeSeries& s);    // n,p_hat,stderr,n_times_p,exact
std::string to_csv(const BallotReport& r);    // n,k,positive,all,match
std::string to_csv(const ConditionalQSeries& s);  // m,mean,std_error,bridges,proposals,exceeds
std::string to_csv(const SiltTailSeries& s);  // m,threshold,probability,std_error
std::string saw_counts_csv(const std::vector<std::uint64_t>& counts);  // n,c_n,mu_hat

}  // namespace cpoly
