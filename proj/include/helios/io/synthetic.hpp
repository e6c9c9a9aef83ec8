#pragma once

// Synthetic instances shaped like the five-site phosphate network: three mining sites that may
// host solar and buy from both providers, two chemical sites that may not.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "helios/core/types.hpp"

namespace helios::io {

struct SyntheticSpec {
  uint64_t seed = 7;
  int years = 3;
  int first_year = 2025;
  int days_per_month = 28;      // capacity-factor days generated per calendar month
  double noise = 0.10;          // hourly multiplicative noise scale
  double ar = 0.85;             // AR(1) coefficient of the hourly noise
  double edge_jitter = 0.35;    // std of sunrise/sunset shift, hours
  double demand_scale = 1.0;
  double demand_growth = 0.02;  // per year
  double budget = 2.0e8;        // MAD
  double battery_cost = 1400.0; // MAD/kWh, year 1
  double battery_decline = 0.06;
  double solar_cost = 4200.0;   // MAD/kW, year 1
  double solar_decline = 0.04;
  double efficiency = 0.99;
};

struct SyntheticData {
  PlanningInstance instance;
  CapacityFactorDataset dataset;
};

namespace synth_detail {

inline double seasonal(int m) { return std::cos(2.0 * M_PI * (m - 5.5) / 12.0); }  // +1 midsummer, -1 midwinter

}  // namespace synth_detail

inline EnergyNetwork default_network(double efficiency = 0.99) {
  EnergyNetwork net;
  net.sites = {{"Jorf", SiteKind::chemical, false, false},
               {"Safi", SiteKind::chemical, false, false},
               {"Benguerir", SiteKind::mining, true, true},
               {"Youssoufia", SiteKind::mining, true, true},
               {"Khouribga", SiteKind::mining, true, true}};
  struct A {
    const char* from;
    const char* to;
    double cap;
  };
  const A arcs[] = {{"Khouribga", "Jorf", 60000.0},
                    {"Benguerir", "Jorf", 40000.0},
                    {"Benguerir", "Safi", 40000.0},
                    {"Youssoufia", "Safi", 40000.0},
                    {"Khouribga", "Benguerir", 30000.0}};
  for (const auto& a : arcs) {
    Arc arc;
    arc.from = a.from;
    arc.to = a.to;
    arc.capacity = a.cap;
    arc.efficiency = efficiency;
    arc.rent_price.assign(12 * 24, 0.02);
    net.arcs.push_back(arc);
  }
  return net;
}

// Hourly ONEE tariff bands (MAD/kWh): off-peak, shoulder, evening peak.
inline double onee_tariff(int h) {
  if (h >= 17 && h < 22) return 1.25;
  if (h >= 7 && h < 17) return 0.85;
  return 0.60;
}

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  SyntheticData out;
  PlanningInstance& inst = out.instance;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> Z(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  inst.name = "synthetic-" + std::to_string(spec.seed);
  inst.network = default_network(spec.efficiency);
  inst.time = TimeStructure::calendar(spec.years, spec.first_year);
  const int N = inst.sites(), Y = spec.years, M = 12, H = 24;

  auto& C = inst.costs;
  C.budget = spec.budget;
  for (int y = 0; y < Y; ++y) {
    C.battery_cost.push_back(spec.battery_cost * std::pow(1.0 - spec.battery_decline, y));
    C.solar_cost.push_back(spec.solar_cost * std::pow(1.0 - spec.solar_decline, y));
  }

  auto& T = inst.tariffs;
  T.months = M;
  T.hours = H;
  T.onee_price.resize(static_cast<size_t>(N) * M * H);
  T.nareva_price.resize(T.onee_price.size());
  T.feed_in_price.resize(T.onee_price.size());
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < M; ++m)
      for (int h = 0; h < H; ++h) {
        size_t i = T.index(n, m, h);
        T.onee_price[i] = onee_tariff(h) * (1.0 + 0.03 * synth_detail::seasonal(m));
        T.nareva_price[i] = inst.network.sites[n].nareva_allowed ? 0.78 : 0.0;
        T.feed_in_price[i] = 0.30;
      }
  T.onee_capacity.assign(H, 250000.0);
  T.nareva_capacity.assign(H, 25000.0);

  // Demand: near-flat industrial load with a daytime shoulder and annual growth.
  const double base[] = {60000.0, 30000.0, 15000.0, 12000.0, 25000.0};
  auto& Dm = inst.demand;
  Dm.sites = N;
  Dm.years = Y;
  Dm.months = M;
  Dm.hours = H;
  Dm.values.resize(static_cast<size_t>(N) * Y * M * H);
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y)
      for (int m = 0; m < M; ++m)
        for (int h = 0; h < H; ++h) {
          double shape = 1.0 + 0.08 * std::sin(M_PI * (h - 6) / 12.0) + 0.03 * synth_detail::seasonal(m);
          Dm.values[Dm.index(n, y, m, h)] =
              spec.demand_scale * base[n % 5] * shape * std::pow(1.0 + spec.demand_growth, y);
        }

  // Capacity factors at the mining sites.
  auto& ds = out.dataset;
  ds.hours = H;
  for (const auto& s : inst.network.sites)
    if (s.solar_allowed) ds.sites.push_back(s.id);
  const int S = ds.site_count();
  static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  for (int m = 0; m < M; ++m) {
    const double season = synth_detail::seasonal(m);
    const double daylen = 12.0 + 2.2 * season;
    const double amp = 0.78 + 0.12 * season;
    const double p_clear = 0.72 + 0.2 * season;
    for (int k = 0; k < std::min(spec.days_per_month, kDays[m]); ++k) {
      CapacityFactorDay day;
      char date[32];
      std::snprintf(date, sizeof date, "%04d-%02d-%02d", spec.first_year, m + 1, k + 1);
      day.date = date;
      day.month = m;
      day.values.assign(static_cast<size_t>(S) * H, 0.0);
      const bool regional_clear = U(rng) < p_clear;
      const double shift = spec.edge_jitter * Z(rng);
      for (int s = 0; s < S; ++s) {
        bool clear = U(rng) < 0.8 ? regional_clear : U(rng) < p_clear;
        double cloud = clear ? 0.92 + 0.08 * U(rng) : 0.35 + 0.35 * U(rng);
        double rise = 12.0 - daylen / 2.0 + shift + 0.1 * Z(rng);
        double set = 12.0 + daylen / 2.0 + shift + 0.1 * Z(rng);
        double e = 0.0;
        for (int h = 0; h < H; ++h) {
          e = spec.ar * e + std::sqrt(1.0 - spec.ar * spec.ar) * spec.noise * (clear ? 0.4 : 1.0) * Z(rng);
          double t = h + 0.5;
          double v = 0.0;
          if (t > rise && t < set) v = amp * cloud * std::pow(std::sin(M_PI * (t - rise) / (set - rise)), 1.3) * (1.0 + e);
          day.values[static_cast<size_t>(s) * H + h] = std::clamp(v, 0.0, 1.0);
        }
      }
      ds.days.push_back(std::move(day));
    }
  }
  return out;
}

}  // namespace helios::io
