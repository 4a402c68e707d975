#pragma once

#include <string>
#include <vector>

#include "handover/geometry.hpp"
#include "handover/point_processes.hpp"

namespace handover {

struct EnvelopeSegment {
    double t_from = 0.0;
    double t_to = 0.0;
    HeadPoint serving;
};

// ⟦q; tau_p, tau_n⟧: classes of the previous and next serving stations,
// q = 1 when the next head is not to the left of the previous one.
struct HandoverType {
    int q = 1;
    int tau_p = 1;
    int tau_n = 1;
    bool operator==(const HandoverType&) const = default;
};

// binom(k; l, r): classes of the left and right heads, k = 1 for the
// first of two mixed intersections.
struct OldNotation {
    int k = 1;
    int l = 1;
    int r = 1;
};

struct HandoverEvent {
    double s = 0.0;
    double h = 0.0;
    HeadPoint prev_head;
    HeadPoint next_head;
    HandoverType type;
    bool boundary = false;
};

// Exact lower envelope over [t_start, t_end]. Uses the line-envelope path
// when every class shares one speed and the crossing sweep otherwise.
// Sets real.overflow_flag when the envelope exceeds the height cap.
std::vector<EnvelopeSegment> lower_envelope(Realization& real);

std::vector<EnvelopeSegment> lower_envelope_lines(const std::vector<HeadPoint>& heads, double v,
                                                  double t_start, double t_end);

// `reach` bounds |T - t| for any head serving at t; pass infinity to scan
// all heads.
std::vector<EnvelopeSegment> lower_envelope_sweep(const std::vector<HeadPoint>& heads,
                                                  const std::vector<double>& class_speed,
                                                  double t_start, double t_end, double reach);

std::vector<HandoverEvent> extract_handovers(const std::vector<EnvelopeSegment>& segments,
                                             const Realization& real);

HandoverType classify(const HeadPoint& prev_head, const HeadPoint& next_head);
// Same, reading the heads from the segments on either side of the event.
HandoverType classify(const HandoverEvent& event, const EnvelopeSegment& prev_segment,
                      const EnvelopeSegment& next_segment);

OldNotation to_old_notation(const HandoverType& type);
std::string type_label(const HandoverType& type);

// Two-speed types in the order 11/1, 22/1, 12/1, 21/1, 12/2, 21/2.
constexpr int two_speed_type_count = 6;
int two_speed_type_index(const HandoverType& type);
HandoverType two_speed_type(int index);

std::vector<HeadPoint> visible_heads(const std::vector<EnvelopeSegment>& segments);

std::vector<double> distances_at(double t, const Realization& real);

// speed per class index (entry 0 unused).
std::vector<double> class_speed_table(const ScenarioConfig& config);

} // namespace handover
