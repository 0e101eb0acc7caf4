#include "sclab/online_standard.hpp"

#include <algorithm>
#include <utility>

#include "sclab/dimensions.hpp"
#include "sclab/errors.hpp"

namespace sclab {

namespace {

// Version-space plumbing shared by both learners. The class itself is
// immutable and shared across clones; only the alive index list is per-copy.
template <typename Derived>
class VersionSpaceLearner : public StandardOnlineLearner {
public:
    explicit VersionSpaceLearner(std::shared_ptr<const HypothesisClass> cls)
        : cls_(std::move(cls)) {
        alive_.resize(static_cast<std::size_t>(cls_->size()));
        for (int i = 0; i < cls_->size(); ++i) alive_[static_cast<std::size_t>(i)] = i;
    }

    void update(VertexId x, int label) override {
        std::vector<int> next = filtered(x, label);
        if (next.empty() && !alive_.empty())
            throw RealizabilityError("online update: no hypothesis matches the fed label");
        alive_ = std::move(next);
    }

    void absorb(VertexId x, int label) override { alive_ = filtered(x, label); }

    std::unique_ptr<StandardOnlineLearner> clone() const override {
        return std::make_unique<Derived>(static_cast<const Derived&>(*this));
    }

    std::unique_ptr<StandardOnlineLearner> clone_with_example(VertexId x,
                                                              int label) const override {
        auto child = std::make_unique<Derived>(static_cast<const Derived&>(*this));
        child->alive_ = child->filtered(x, label);  // tolerant: may come back empty
        return child;
    }

    int version_size() const override { return static_cast<int>(alive_.size()); }

    bool consistent_with(const Hypothesis& h) const override {
        for (int i : alive_)
            if (cls_->at(i) == h) return true;
        return false;
    }

protected:
    std::vector<int> filtered(VertexId x, int label) const {
        std::vector<int> next;
        next.reserve(alive_.size());
        for (int i : alive_)
            if (cls_->at(i)(x) == label) next.push_back(i);
        return next;
    }

    std::shared_ptr<const HypothesisClass> cls_;
    std::vector<int> alive_;
};

class Soa final : public VersionSpaceLearner<Soa> {
public:
    Soa(std::shared_ptr<const HypothesisClass> cls, std::shared_ptr<LdimEvaluator> ldim)
        : VersionSpaceLearner(std::move(cls)), ldim_(std::move(ldim)) {}

    int predict(VertexId x) const override {
        if (alive_.empty()) return 0;
        std::vector<int> zero = filtered(x, 0);
        std::vector<int> one = filtered(x, 1);
        if (one.empty()) return 0;
        if (zero.empty()) return 1;
        return ldim_->ldim(one) >= ldim_->ldim(zero) ? 1 : 0;
    }

private:
    std::shared_ptr<LdimEvaluator> ldim_;  // memo shared across every clone
};

class Halving final : public VersionSpaceLearner<Halving> {
public:
    using VersionSpaceLearner::VersionSpaceLearner;

    int predict(VertexId x) const override {
        if (alive_.empty()) return 0;
        std::size_t ones = 0;
        for (int i : alive_) ones += static_cast<std::size_t>(cls_->at(i)(x));
        return 2 * ones >= alive_.size() ? 1 : 0;
    }
};

}  // namespace

std::unique_ptr<StandardOnlineLearner> soa(const HypothesisClass& cls) {
    auto shared = std::make_shared<const HypothesisClass>(cls);
    return std::make_unique<Soa>(shared, std::make_shared<LdimEvaluator>(*shared));
}

std::unique_ptr<StandardOnlineLearner> halving(const HypothesisClass& cls) {
    return std::make_unique<Halving>(std::make_shared<const HypothesisClass>(cls));
}

}  // namespace sclab
