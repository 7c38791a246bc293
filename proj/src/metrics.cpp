#include "corridor/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace corridor {

bool is_vehicle_delayed(double speed_kmh, double threshold_kmh) {
  return speed_kmh < threshold_kmh;
}

long long DelaySnapshot::person_count() const {
  long long n = 0;
  for (int occ : delayed_vehicle_occupants) n += occ;
  return n + pedestrian_count();
}

long long DelaySnapshot::pedestrian_count() const {
  long long n = 0;
  for (long long p : delayed_pedestrians) n += p;
  return n;
}

double compute_reward(const DelaySnapshot& snap, double w_veh, double w_ped) {
  double veh = 0.0;
  for (int occ : snap.delayed_vehicle_occupants) veh += occ;
  double ped = static_cast<double>(snap.pedestrian_count());
  return -(w_veh * veh + w_ped * ped);
}

MetricsReport accumulate_metrics(const std::vector<DelaySnapshot>& snapshots,
                                 const std::vector<TripRecord>& trips,
                                 double demand) {
  const double T = static_cast<double>(snapshots.size());
  if (T < 1) throw std::invalid_argument("accumulate_metrics: need T >= 1");
  if (demand < 1) throw std::invalid_argument("accumulate_metrics: need D >= 1");

  MetricsReport r;
  r.horizon_s = T;
  r.demand = demand;

  double delayed_veh_steps = 0.0;
  double delayed_ped_steps = 0.0;
  for (const auto& s : snapshots) {
    r.aid += static_cast<double>(s.person_count());
    delayed_veh_steps += static_cast<double>(s.delayed_vehicle_count());
    delayed_ped_steps += static_cast<double>(s.pedestrian_count());
  }
  r.pcd = r.aid / demand;
  r.avds = delayed_veh_steps / T;
  r.apds = delayed_ped_steps / T;

  double veh_delay = 0.0, veh_delay_ff = 0.0, ped_delay = 0.0;
  for (const auto& t : trips) {
    if (t.mode == 'v') {
      ++r.n_vehicles;
      veh_delay += t.delay_s;
      veh_delay_ff += t.delay_freeflow_s;
    } else {
      ++r.n_pedestrians;
      ped_delay += t.delay_s;
    }
  }
  if (r.n_vehicles > 0) {
    r.adv = veh_delay / r.n_vehicles;
    r.adv_freeflow = veh_delay_ff / r.n_vehicles;
  }
  if (r.n_pedestrians > 0) r.awtp = ped_delay / r.n_pedestrians;
  return r;
}

double improvement(double baseline_aid, double ours_aid) {
  if (baseline_aid <= 0)
    throw std::domain_error("improvement: baseline AID must be > 0");
  return 100.0 * (baseline_aid - ours_aid) / baseline_aid;
}

namespace {

MetricStat stat_of(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

}  // namespace

SweepStats seed_sweep_stats(const std::vector<MetricsReport>& reports) {
  if (reports.size() < 2)
    throw std::invalid_argument("seed_sweep_stats: need >= 2 reports");
  SweepStats out;
  out.n = static_cast<int>(reports.size());
  std::vector<double> aid, pcd, avds, apds, adv, awtp;
  for (const auto& r : reports) {
    aid.push_back(r.aid);
    pcd.push_back(r.pcd);
    avds.push_back(r.avds);
    apds.push_back(r.apds);
    adv.push_back(r.adv.value_or(0.0));
    awtp.push_back(r.awtp.value_or(0.0));
  }
  out.aid = stat_of(aid);
  out.pcd = stat_of(pcd);
  out.avds = stat_of(avds);
  out.apds = stat_of(apds);
  out.adv = stat_of(adv);
  out.awtp = stat_of(awtp);
  return out;
}

double paired_one_sided_p(const std::vector<double>& a,
                          const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("paired_one_sided_p: need matched samples, n >= 2");
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const MetricStat s = stat_of(d);
  const double n = static_cast<double>(d.size());
  if (s.stddev == 0.0) return s.mean > 0.0 ? 0.0 : s.mean < 0.0 ? 1.0 : 0.5;
  const double t = s.mean / (s.stddev / std::sqrt(n));
  boost::math::students_t dist(n - 1.0);
  return boost::math::cdf(boost::math::complement(dist, t));
}

}  // namespace corridor
