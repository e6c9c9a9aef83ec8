#pragma once

// JSON encoding of the domain types. Field names are the schema documented in README.md.

#include <json.hpp>

#include "helios/core/error.hpp"
#include "helios/core/types.hpp"

namespace helios {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(out);
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double inf_if_null(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).is_null() ? kInf : j.at(key).get<double>();
}

}  // namespace detail

NLOHMANN_JSON_SERIALIZE_ENUM(SiteKind, {{SiteKind::mining, "mining"}, {SiteKind::chemical, "chemical"}})

inline void to_json(json& j, const Site& s) {
  j = {{"id", s.id}, {"kind", s.kind}, {"solar_allowed", s.solar_allowed}, {"nareva_allowed", s.nareva_allowed}};
}
inline void from_json(const json& j, Site& s) {
  j.at("id").get_to(s.id);
  j.at("kind").get_to(s.kind);
  s.solar_allowed = s.kind == SiteKind::mining;
  s.nareva_allowed = s.kind == SiteKind::mining;
  detail::get_opt(j, "solar_allowed", s.solar_allowed);
  detail::get_opt(j, "nareva_allowed", s.nareva_allowed);
}

inline void to_json(json& j, const Arc& a) {
  j = {{"from", a.from}, {"to", a.to}, {"capacity", a.capacity}, {"efficiency", a.efficiency},
       {"rent_price", a.rent_price}};
}
inline void from_json(const json& j, Arc& a) {
  j.at("from").get_to(a.from);
  j.at("to").get_to(a.to);
  j.at("capacity").get_to(a.capacity);
  j.at("efficiency").get_to(a.efficiency);
  j.at("rent_price").get_to(a.rent_price);
}

inline void to_json(json& j, const EnergyNetwork& n) { j = {{"sites", n.sites}, {"arcs", n.arcs}}; }
inline void from_json(const json& j, EnergyNetwork& n) {
  j.at("sites").get_to(n.sites);
  detail::get_opt(j, "arcs", n.arcs);
}

inline void to_json(json& j, const TimeStructure& t) {
  j = {{"hours_per_day", t.hours_per_day}, {"months", t.months}, {"years", t.years},
       {"days_in_month", t.days_in_month}};
}
inline void from_json(const json& j, TimeStructure& t) {
  detail::get_opt(j, "hours_per_day", t.hours_per_day);
  detail::get_opt(j, "months", t.months);
  j.at("years").get_to(t.years);
  if (j.contains("days_in_month")) {
    j.at("days_in_month").get_to(t.days_in_month);
  } else if (t.months == 12) {
    int first = j.value("first_year", 2025);
    t.days_in_month = TimeStructure::calendar(t.years, first).days_in_month;
  }
}

inline void to_json(json& j, const CostParameters& c) {
  j = {{"budget", c.budget},
       {"discount", c.discount},
       {"battery_cost", c.battery_cost},
       {"solar_cost", c.solar_cost},
       {"solar_degradation", c.solar_degradation},
       {"battery_degradation", c.battery_degradation},
       {"battery_retention", c.battery_retention},
       {"sell_fraction", c.sell_fraction},
       {"discharge_rate", c.discharge_rate}};
}
inline void from_json(const json& j, CostParameters& c) {
  j.at("budget").get_to(c.budget);
  j.at("battery_cost").get_to(c.battery_cost);
  j.at("solar_cost").get_to(c.solar_cost);
  detail::get_opt(j, "discount", c.discount);
  detail::get_opt(j, "solar_degradation", c.solar_degradation);
  detail::get_opt(j, "battery_degradation", c.battery_degradation);
  detail::get_opt(j, "battery_retention", c.battery_retention);
  detail::get_opt(j, "sell_fraction", c.sell_fraction);
  detail::get_opt(j, "discharge_rate", c.discharge_rate);
}

inline void to_json(json& j, const TariffSchedule& t) {
  j = {{"months", t.months},
       {"hours", t.hours},
       {"onee_price", t.onee_price},
       {"nareva_price", t.nareva_price},
       {"feed_in_price", t.feed_in_price},
       {"onee_capacity", t.onee_capacity},
       {"nareva_capacity", t.nareva_capacity}};
}
inline void from_json(const json& j, TariffSchedule& t) {
  detail::get_opt(j, "months", t.months);
  detail::get_opt(j, "hours", t.hours);
  j.at("onee_price").get_to(t.onee_price);
  j.at("nareva_price").get_to(t.nareva_price);
  j.at("feed_in_price").get_to(t.feed_in_price);
  j.at("onee_capacity").get_to(t.onee_capacity);
  j.at("nareva_capacity").get_to(t.nareva_capacity);
}

inline void to_json(json& j, const DemandProfile& d) {
  j = {{"sites", d.sites}, {"years", d.years}, {"months", d.months}, {"hours", d.hours}, {"values", d.values}};
}
inline void from_json(const json& j, DemandProfile& d) {
  j.at("sites").get_to(d.sites);
  j.at("years").get_to(d.years);
  detail::get_opt(j, "months", d.months);
  detail::get_opt(j, "hours", d.hours);
  j.at("values").get_to(d.values);
}

inline void to_json(json& j, const CapacityFactorDay& d) {
  j = {{"date", d.date}, {"month", d.month}, {"values", d.values}};
}
inline void from_json(const json& j, CapacityFactorDay& d) {
  j.at("date").get_to(d.date);
  j.at("month").get_to(d.month);
  j.at("values").get_to(d.values);
}

inline void to_json(json& j, const CapacityFactorDataset& d) {
  j = {{"sites", d.sites}, {"hours", d.hours}, {"days", d.days}};
}
inline void from_json(const json& j, CapacityFactorDataset& d) {
  j.at("sites").get_to(d.sites);
  detail::get_opt(j, "hours", d.hours);
  j.at("days").get_to(d.days);
}

inline void to_json(json& j, const InvestmentPlan& p) {
  j = {{"sites", p.sites}, {"years", p.years}, {"battery", p.battery}, {"solar", p.solar}};
}
inline void from_json(const json& j, InvestmentPlan& p) {
  j.at("sites").get_to(p.sites);
  j.at("years").get_to(p.years);
  j.at("battery").get_to(p.battery);
  j.at("solar").get_to(p.solar);
}

inline void to_json(json& j, const DispatchSchedule& d) {
  j = {{"hours", d.hours},         {"scenarios", d.scenarios}, {"months", d.months},
       {"years", d.years},         {"sites", d.sites},         {"arcs", d.arcs},
       {"flow_pos", d.flow_pos},   {"flow_neg", d.flow_neg},   {"storage", d.storage},
       {"discharge", d.discharge}, {"onee", d.onee},           {"nareva", d.nareva},
       {"sales", d.sales}};
}
inline void from_json(const json& j, DispatchSchedule& d) {
  j.at("hours").get_to(d.hours);
  j.at("scenarios").get_to(d.scenarios);
  j.at("months").get_to(d.months);
  j.at("years").get_to(d.years);
  j.at("sites").get_to(d.sites);
  j.at("arcs").get_to(d.arcs);
  j.at("flow_pos").get_to(d.flow_pos);
  j.at("flow_neg").get_to(d.flow_neg);
  j.at("storage").get_to(d.storage);
  j.at("discharge").get_to(d.discharge);
  j.at("onee").get_to(d.onee);
  j.at("nareva").get_to(d.nareva);
  j.at("sales").get_to(d.sales);
}

inline void to_json(json& j, const EmissionIntensity& e) {
  j = {{"onee", e.onee}, {"nareva", e.nareva}, {"local", e.local}};
}
inline void from_json(const json& j, EmissionIntensity& e) {
  detail::get_opt(j, "onee", e.onee);
  detail::get_opt(j, "nareva", e.nareva);
  detail::get_opt(j, "local", e.local);
}

inline void to_json(json& j, const ReducedScenarioSet& s) {
  j = {{"sites", s.sites},           {"scenarios", s.scenarios},
       {"hours", s.hours},           {"months", s.months},
       {"segment_days", s.segment_days}, {"centroids", s.centroids},
       {"weights", s.weights},       {"assignment", s.assignment},
       {"day_month", s.day_month},   {"transport", s.transport},
       {"members", s.members}};
}
inline void from_json(const json& j, ReducedScenarioSet& s) {
  j.at("sites").get_to(s.sites);
  j.at("scenarios").get_to(s.scenarios);
  detail::get_opt(j, "hours", s.hours);
  detail::get_opt(j, "months", s.months);
  detail::get_opt(j, "segment_days", s.segment_days);
  j.at("centroids").get_to(s.centroids);
  j.at("weights").get_to(s.weights);
  detail::get_opt(j, "assignment", s.assignment);
  detail::get_opt(j, "day_month", s.day_month);
  detail::get_opt(j, "transport", s.transport);
  detail::get_opt(j, "members", s.members);
}

inline void to_json(json& j, const UncertaintyStatistics& s) {
  j = {{"scenarios", s.scenarios}, {"hours", s.hours}, {"u_max", s.u_max}, {"u_sv", s.u_sv}, {"sigma", s.sigma}};
}
inline void from_json(const json& j, UncertaintyStatistics& s) {
  j.at("scenarios").get_to(s.scenarios);
  detail::get_opt(j, "hours", s.hours);
  j.at("u_max").get_to(s.u_max);
  j.at("u_sv").get_to(s.u_sv);
  j.at("sigma").get_to(s.sigma);
}

inline void to_json(json& j, const UncertaintyBudget& g) {
  j = {{"gamma_max", g.gamma_max}, {"gamma_c", g.gamma_c}, {"gamma_clt", g.gamma_clt}};
}
inline void from_json(const json& j, UncertaintyBudget& g) {
  detail::get_opt(j, "gamma_max", g.gamma_max);
  detail::get_opt(j, "gamma_c", g.gamma_c);
  detail::get_opt(j, "gamma_clt", g.gamma_clt);
}

inline void to_json(json& j, const ModelOptions& o) {
  j = {{"paper_literal_ro", o.paper_literal_ro},
       {"solar_trend_total", o.solar_trend_total},
       {"solar_trend_years", o.solar_trend_years},
       {"power_rating", detail::finite_or_null(o.power_rating)},
       {"literal_realtime_sell_cap", o.literal_realtime_sell_cap}};
}
inline void from_json(const json& j, ModelOptions& o) {
  detail::get_opt(j, "paper_literal_ro", o.paper_literal_ro);
  detail::get_opt(j, "solar_trend_total", o.solar_trend_total);
  detail::get_opt(j, "solar_trend_years", o.solar_trend_years);
  o.power_rating = detail::inf_if_null(j, "power_rating", kInf);
  detail::get_opt(j, "literal_realtime_sell_cap", o.literal_realtime_sell_cap);
}

inline void to_json(json& j, const PlanningInstance& p) {
  j = {{"schema_version", kSchemaVersion},
       {"name", p.name},
       {"network", p.network},
       {"time", p.time},
       {"costs", p.costs},
       {"tariffs", p.tariffs},
       {"demand", p.demand},
       {"emissions", p.emissions},
       {"robustness", p.robustness},
       {"delta", p.delta},
       {"options", p.options}};
  j["scenarios"] = p.scenarios ? json(*p.scenarios) : json(nullptr);
  j["statistics"] = p.statistics ? json(*p.statistics) : json(nullptr);
  j["fixed_investment"] = p.fixed_investment ? json(*p.fixed_investment) : json(nullptr);
}
inline void from_json(const json& j, PlanningInstance& p) {
  detail::get_opt(j, "name", p.name);
  j.at("network").get_to(p.network);
  j.at("time").get_to(p.time);
  j.at("costs").get_to(p.costs);
  j.at("tariffs").get_to(p.tariffs);
  j.at("demand").get_to(p.demand);
  detail::get_opt(j, "emissions", p.emissions);
  detail::get_opt(j, "robustness", p.robustness);
  detail::get_opt(j, "delta", p.delta);
  detail::get_opt(j, "options", p.options);
  p.scenarios.reset();
  p.statistics.reset();
  p.fixed_investment.reset();
  if (j.contains("scenarios") && !j["scenarios"].is_null()) p.scenarios = j["scenarios"].get<ReducedScenarioSet>();
  if (j.contains("statistics") && !j["statistics"].is_null())
    p.statistics = j["statistics"].get<UncertaintyStatistics>();
  if (j.contains("fixed_investment") && !j["fixed_investment"].is_null())
    p.fixed_investment = j["fixed_investment"].get<InvestmentPlan>();
}

// Decode with schema errors mapped to helios::Error.
template <class T>
T decode(const json& j, std::string_view what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::schema, std::string(what) + ": " + e.what());
  }
}

}  // namespace helios
