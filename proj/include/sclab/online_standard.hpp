// Standard (non-strategic) online learners over a finite class: SOA and
// Halving behind one interface, so the strategic reductions can wrap either.
#pragma once

#include <memory>

#include "sclab/graph.hpp"

namespace sclab {

// Deterministic realizable online learner. Implementations keep a version
// space. `update` is the strict protocol feed: an example that empties the
// version space throws RealizabilityError and changes nothing.
// `clone_with_example` is the tolerant fork the expert reductions use: the
// child absorbs the example even when it contradicts every survivor, and a
// contradicted (dead) child predicts 0 everywhere from then on.
class StandardOnlineLearner {
public:
    virtual ~StandardOnlineLearner() = default;

    virtual int predict(VertexId x) const = 0;
    virtual void update(VertexId x, int label) = 0;
    // Tolerant in-place feed: like clone_with_example but on this instance.
    virtual void absorb(VertexId x, int label) = 0;
    virtual std::unique_ptr<StandardOnlineLearner> clone() const = 0;
    virtual std::unique_ptr<StandardOnlineLearner> clone_with_example(VertexId x,
                                                                      int label) const = 0;

    virtual int version_size() const = 0;
    virtual bool consistent_with(const Hypothesis& h) const = 0;
    bool dead() const { return version_size() == 0; }
};

// Standard optimal algorithm: predict the label whose version-space
// restriction has the larger Littlestone dimension, ties toward 1; when one
// restriction is empty the other label is forced. Mistake bound: Ldim of the
// class. Clones share one memoized Ldim evaluator.
std::unique_ptr<StandardOnlineLearner> soa(const HypothesisClass& cls);

// Majority vote over the surviving hypotheses, ties toward 1. Mistake bound:
// log2 of the class size.
std::unique_ptr<StandardOnlineLearner> halving(const HypothesisClass& cls);

}  // namespace sclab
