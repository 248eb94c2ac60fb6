#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spreadnet/graph.hpp"

namespace spreadnet {

struct TimedEntry {
    NodeId node;
    double time;
};

// Indexed 4-ary heap over nodes keyed by absolute event time. At most one
// entry per node; push/update/remove are O(log size) through a node -> slot
// position map. Equal times break ties toward the smaller node id. The wide
// fanout halves the sift depth, which matters once the heap outgrows cache.
class IndexedQueue {
public:
    explicit IndexedQueue(NodeId node_capacity)
        : pos_(node_capacity, kAbsent) {}

    std::size_t size() const { return heap_.size(); }
    bool empty() const { return heap_.empty(); }
    bool contains(NodeId node) const { return pos_.at(node) != kAbsent; }

    void push(NodeId node, double time) {
        if (pos_.at(node) != kAbsent)
            throw std::logic_error("queue push: node already present");
        check_time(time);
        heap_.push_back({node, time});
        pos_[node] = static_cast<std::uint32_t>(heap_.size() - 1);
        sift_up(heap_.size() - 1);
    }

    void update(NodeId node, double time) {
        const std::size_t i = pos_.at(node);
        if (i == kAbsent) throw std::logic_error("queue update: node not present");
        check_time(time);
        heap_[i].time = time;
        if (!sift_up(i)) sift_down(i);
    }

    // single position-map lookup for the common reschedule case
    void upsert(NodeId node, double time) {
        const std::size_t i = pos_.at(node);
        if (i == kAbsent) {
            check_time(time);
            heap_.push_back({node, time});
            pos_[node] = static_cast<std::uint32_t>(heap_.size() - 1);
            sift_up(heap_.size() - 1);
        } else {
            check_time(time);
            heap_[i].time = time;
            if (!sift_up(i)) sift_down(i);
        }
    }

    void remove(NodeId node) {
        const std::size_t i = pos_.at(node);
        if (i == kAbsent) throw std::logic_error("queue remove: node not present");
        erase_slot(i);
    }

    // rekey the minimum entry in place, cheaper than pop followed by push
    void replace_min(double time) {
        if (heap_.empty()) throw std::out_of_range("queue replace: empty");
        check_time(time);
        heap_[0].time = time;
        sift_down(0);
    }

    TimedEntry pop_min() {
        if (heap_.empty()) throw std::out_of_range("queue pop: empty");
        const TimedEntry top = heap_.front();
        erase_slot(0);
        return top;
    }

    const TimedEntry& peek_min() const {
        if (heap_.empty()) throw std::out_of_range("queue peek: empty");
        return heap_.front();
    }

private:
    static constexpr std::uint32_t kAbsent = static_cast<std::uint32_t>(-1);

    static void check_time(double time) {
        if (!std::isfinite(time)) throw std::logic_error("queue: time must be finite");
    }

    static bool before(const TimedEntry& a, const TimedEntry& b) {
        return a.time != b.time ? a.time < b.time : a.node < b.node;
    }

    void place(std::size_t i, const TimedEntry& e) {
        heap_[i] = e;
        pos_[e.node] = static_cast<std::uint32_t>(i);
    }

    bool sift_up(std::size_t i) {
        const TimedEntry e = heap_[i];
        bool moved = false;
        while (i > 0) {
            const std::size_t parent = (i - 1) / 4;
            if (!before(e, heap_[parent])) break;
            place(i, heap_[parent]);
            i = parent;
            moved = true;
        }
        place(i, e);
        return moved;
    }

    void sift_down(std::size_t i) {
        const TimedEntry e = heap_[i];
        const std::size_t n = heap_.size();
        for (;;) {
            std::size_t child = 4 * i + 1;
            if (child >= n) break;
            const std::size_t end = std::min(child + 4, n);
            for (std::size_t k = child + 1; k < end; ++k)
                if (before(heap_[k], heap_[child])) child = k;
            if (!before(heap_[child], e)) break;
            place(i, heap_[child]);
            i = child;
        }
        place(i, e);
    }

    void erase_slot(std::size_t i) {
        pos_[heap_[i].node] = kAbsent;
        const TimedEntry last = heap_.back();
        heap_.pop_back();
        if (i < heap_.size()) {
            place(i, last);
            if (!sift_up(i)) sift_down(i);
        }
    }

    std::vector<TimedEntry> heap_;
    std::vector<std::uint32_t> pos_;
};

}  // namespace spreadnet
