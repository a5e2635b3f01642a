#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dirt/common/errors.hpp"
#include "dirt/transport/reference.hpp"
#include "dirt/transport/schedule.hpp"
#include "dirt/transport/sirt.hpp"
#include "dirt/tt/cross.hpp"

namespace dirt {

/// Unnormalized log density in physical coordinates; -inf marks zero density.
using LogTarget = std::function<double(std::span<const double>)>;

/// Per-dimension affine map between the reference box and the physical bounds.
class AffineScaling {
public:
    AffineScaling() = default;
    AffineScaling(Interval reference_box, std::vector<Interval> physical);

    [[nodiscard]] std::size_t dim() const noexcept { return physical_.size(); }
    [[nodiscard]] const std::vector<Interval>& physical() const noexcept { return physical_; }
    [[nodiscard]] double to_physical(std::size_t k, double z) const;
    [[nodiscard]] double to_reference(std::size_t k, double x) const;
    /// log |dx/dz|, summed over dimensions.
    [[nodiscard]] double log_jacobian() const noexcept { return log_jacobian_; }

    bool operator==(const AffineScaling&) const = default;

private:
    Interval box_{-1.0, 1.0};
    std::vector<Interval> physical_;
    double log_jacobian_ = 0.0;
};

struct DirtConfig {
    std::size_t grid_nodes = 33;
    CrossConfig cross;
    double floor_fraction = kDefaultFloorFraction;
    /// Reference draws used to pick the log-space shift applied before exponentiating.
    std::size_t pilot_samples = 64;

    void validate(std::size_t dim) const;
};

struct DirtBuildStats {
    std::size_t target_evaluations = 0;  ///< calls to the physical log target
    std::vector<CrossReport> layers;
};

/// Composite map T = S_0 o S_1 o ... o S_{L-1}, S_l(u) = Q_l(R(u)) with R the reference CDF and
/// Q_l the inverse Rosenblatt map of layer l. Layer l approximates the tempered target
/// pi^beta_l pulled back through the earlier layers, so T pushes the reference onto pi.
class DirtMap {
public:
    DirtMap() = default;
    DirtMap(std::vector<SirtLayer> layers, TemperingSchedule schedule, ReferenceDensity reference,
            AffineScaling scaling, DirtBuildStats stats = {});

    [[nodiscard]] std::size_t dim() const noexcept { return scaling_.dim(); }
    [[nodiscard]] std::size_t layer_count() const noexcept { return layers_.size(); }
    [[nodiscard]] const std::vector<SirtLayer>& layers() const noexcept { return layers_; }
    [[nodiscard]] const TemperingSchedule& schedule() const noexcept { return schedule_; }
    [[nodiscard]] const ReferenceDensity& reference() const noexcept { return reference_; }
    [[nodiscard]] const AffineScaling& scaling() const noexcept { return scaling_; }
    [[nodiscard]] const DirtBuildStats& stats() const noexcept { return stats_; }

    /// Sequential push state: one cursor per layer plus the density accumulated so far.
    struct PushState {
        std::vector<SirtLayer::Cursor> cursors;
        std::vector<double> z;  ///< reference-box outputs of the oldest layer
        double log_density = 0.0;
    };

    /// Push state of the first `layers` layers (all when npos).
    [[nodiscard]] PushState begin(std::size_t layers = static_cast<std::size_t>(-1)) const;
    /// Pushes the next reference coordinate u through the state's layers, newest first.
    void advance(PushState& s, double u) const;

    struct Sample {
        std::vector<double> x;
        double log_density = 0.0;  ///< log of the pushforward density at x
    };

    /// Reference draw u (inside the reference box) to physical x with log pushforward density.
    [[nodiscard]] Sample push(std::span<const double> u) const;
    /// Inverse of push: physical x to reference u; log_density is the pushforward density at x.
    [[nodiscard]] Sample pull(std::span<const double> x) const;
    /// log pushforward density at physical x; -inf outside the bounds.
    [[nodiscard]] double log_density(std::span<const double> x) const;
    /// Draws u from the reference and pushes it.
    [[nodiscard]] Sample sample(Rng& rng) const;

    void write_text(std::ostream& os) const;
    [[nodiscard]] std::string to_text() const;
    static DirtMap read_text(std::istream& is);
    static DirtMap from_text(const std::string& text);

private:
    std::vector<SirtLayer> layers_;
    TemperingSchedule schedule_;
    ReferenceDensity reference_;
    AffineScaling scaling_;
    DirtBuildStats stats_;
};

/// Raised when a layer fails to build; carries the number of completed layers.
struct DirtBuildError : Error {
    DirtBuildError(ErrorKind kind, const std::string& what, std::size_t completed)
        : Error(kind, what), completed_layers(completed) {}
    std::size_t completed_layers;
};

/// Builds one layer per schedule entry for the target pi (log form, physical coordinates).
DirtMap dirt_build(const LogTarget& log_target, std::span<const Interval> bounds,
                   const TemperingSchedule& schedule, const ReferenceDensity& reference,
                   const DirtConfig& cfg);

/// Pushes u through the map; returns physical x and its log pushforward density.
DirtMap::Sample dirt_sample(const DirtMap& map, std::span<const double> u);

}  // namespace dirt
