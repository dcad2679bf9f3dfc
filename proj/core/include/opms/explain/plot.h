#ifndef OPMS_EXPLAIN_PLOT_H_
#define OPMS_EXPLAIN_PLOT_H_

#include <span>
#include <string>
#include <vector>

#include "opms/explain/explanation.h"

namespace opms::explain {

struct DecisionPlotData {
  // Least to most influential; the last entry is drawn at the top.
  std::vector<std::string> features;
  double base_value = 0.0;
  // Margin explanations drawn on the probability axis.
  bool sigmoid_applied = false;
  // Per sample: base_value followed by one cumulative value per feature.
  std::vector<std::vector<double>> trajectories;
  std::vector<int> predicted;  // 1 = attack
};

struct DecisionPlotOptions {
  // Map margin trajectories through the logistic function.
  bool probability_axis = true;
};

// `outputs` are the model outputs on the explanation's target scale.
// Throws MisalignedInputs when outputs and explained samples differ in count.
DecisionPlotData decision_plot_data(const ShapExplanation& expl, std::span<const double> outputs,
                                    const DecisionPlotOptions& options = {});

// Columns: sample,predicted,step,feature,value
std::string decision_plot_csv(const DecisionPlotData& data);

// One polyline per sample; red for predicted attack, purple otherwise, gray
// vertical line at the base value.
std::string decision_plot_svg(const DecisionPlotData& data, const std::string& title = {});

}  // namespace opms::explain

#endif  // OPMS_EXPLAIN_PLOT_H_
