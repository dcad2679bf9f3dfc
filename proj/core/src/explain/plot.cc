#include "opms/explain/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "opms/error.h"
#include "opms/io.h"

namespace opms::explain {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

DecisionPlotData decision_plot_data(const ShapExplanation& expl, std::span<const double> outputs,
                                    const DecisionPlotOptions& options) {
  if (outputs.size() != expl.num_samples()) {
    throw Error(ErrorCode::kMisalignedInputs,
                std::to_string(outputs.size()) + " outputs for " +
                    std::to_string(expl.num_samples()) + " explained samples");
  }
  DecisionPlotData d;
  std::vector<std::size_t> ascending =
      expl.feature_order.empty() ? order_by_influence(expl.phi) : expl.feature_order;
  std::reverse(ascending.begin(), ascending.end());
  for (std::size_t j : ascending) d.features.push_back(expl.features[j]);

  const bool margin = expl.target == Target::kMargin;
  d.sigmoid_applied = margin && options.probability_axis;
  auto display = [&](double v) { return d.sigmoid_applied ? sigmoid(v) : v; };
  d.base_value = display(expl.base_value);
  for (std::size_t i = 0; i < expl.num_samples(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<double> t;
    t.reserve(ascending.size() + 1);
    double acc = expl.base_value;
    t.push_back(display(acc));
    for (std::size_t j : ascending) {
      acc += expl.phi(r, static_cast<Eigen::Index>(j));
      t.push_back(display(acc));
    }
    d.trajectories.push_back(std::move(t));
    d.predicted.push_back(margin ? (outputs[i] >= 0.0 ? 1 : 0) : (outputs[i] >= 0.5 ? 1 : 0));
  }
  return d;
}

std::string decision_plot_csv(const DecisionPlotData& data) {
  std::string out = "sample,predicted,step,feature,value\n";
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const auto& t = data.trajectories[i];
    for (std::size_t k = 0; k < t.size(); ++k) {
      out += std::to_string(i) + "," + std::to_string(data.predicted[i]) + "," +
             std::to_string(k) + "," + (k == 0 ? std::string("base") : data.features[k - 1]) +
             ",";
      append_double(out, t[k]);
      out += "\n";
    }
  }
  return out;
}

std::string decision_plot_svg(const DecisionPlotData& data, const std::string& title) {
  constexpr double kLeft = 150.0;
  constexpr double kRight = 30.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 50.0;
  constexpr double kRow = 18.0;
  constexpr double kPlotWidth = 480.0;
  const auto steps = data.features.size();
  const double height = kTop + kBottom + kRow * static_cast<double>(steps);
  const double width = kLeft + kPlotWidth + kRight;

  double lo = data.base_value;
  double hi = data.base_value;
  for (const auto& t : data.trajectories) {
    for (double v : t) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (data.sigmoid_applied || (lo >= 0.0 && hi <= 1.0)) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 1.0);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  auto sx = [&](double v) { return kLeft + (v - lo) / (hi - lo) * kPlotWidth; };
  // Step 0 (base) sits on the bottom axis, step k on row k counted upward.
  auto sy = [&](std::size_t k) { return kTop + kRow * static_cast<double>(steps) - kRow * static_cast<double>(k); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) + "\" height=\"" +
       fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    s += "<text x=\"" + fixed(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" +
         escape_xml(title) + "</text>\n";
  }
  for (std::size_t k = 1; k <= steps; ++k) {
    const double y = sy(k);
    s += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(kLeft + kPlotWidth) +
         "\" y2=\"" + fixed(y) + "\" stroke=\"#eeeeee\"/>\n";
    s += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(y + 4) + "\" text-anchor=\"end\">" +
         escape_xml(data.features[k - 1]) + "</text>\n";
  }
  const double axis_y = sy(0);
  s += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(axis_y) + "\" x2=\"" +
       fixed(kLeft + kPlotWidth) + "\" y2=\"" + fixed(axis_y) + "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    s += "<text x=\"" + fixed(sx(v)) + "\" y=\"" + fixed(axis_y + 15) + "\" text-anchor=\"middle\">" +
         fixed(v) + "</text>\n";
  }
  const std::string axis_label = data.sigmoid_applied ? "model output (probability, from margin)"
                                                      : "model output";
  s += "<text x=\"" + fixed(kLeft + kPlotWidth / 2) + "\" y=\"" + fixed(axis_y + 35) +
       "\" text-anchor=\"middle\">" + axis_label + "</text>\n";
  s += "<line x1=\"" + fixed(sx(data.base_value)) + "\" y1=\"" + fixed(kTop - 5) + "\" x2=\"" +
       fixed(sx(data.base_value)) + "\" y2=\"" + fixed(axis_y) +
       "\" stroke=\"gray\" stroke-width=\"1.5\"/>\n";
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const auto& t = data.trajectories[i];
    s += "<polyline fill=\"none\" stroke-width=\"1\" stroke-opacity=\"0.7\" stroke=\"";
    s += data.predicted[i] == 1 ? "#d62728" : "#7b3294";
    s += "\" points=\"";
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k) s += ' ';
      s += fixed(sx(t[k])) + "," + fixed(sy(k));
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace opms::explain
