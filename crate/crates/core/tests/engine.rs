mod common;

use std::cell::RefCell;

use common::{custom_graphs, graphs_for, line, shell};
use lisl_core::engine::{drop_policy, run, Admission, Engine, SimParams, SimReport, SimTrace};
use lisl_core::routing::shortest_path;
use lisl_core::topology::Arrangement;
use lisl_core::traffic::DataFlow;
use lisl_core::Error;
use proptest::prelude::*;

/// 1250-byte chunks take exactly 100 ns at 100 Gbps.
const CHUNK: u64 = 1250;
const T: u64 = 100;

fn params(chunk_bytes: u64, cap: Option<u64>) -> SimParams {
    SimParams {
        chunk_bytes,
        buffer_cap_bytes: cap,
        ..SimParams::default()
    }
}

fn flow(flow_id: u64, src: u32, dst: u32, size_bytes: u64) -> DataFlow {
    DataFlow {
        flow_id,
        src,
        dst,
        size_bytes,
    }
}

/// Store-and-forward finish time of chunk `j` on hop `k` of an idle path:
/// each chunk waits for its own previous hop and for the chunk ahead of it
/// on the same link.
fn pipeline_oracle(chunks: usize, hops: usize, t: u64) -> u64 {
    let mut finish = vec![vec![0u64; hops + 1]; chunks + 1];
    for j in 1..=chunks {
        for k in 1..=hops {
            finish[j][k] = finish[j - 1][k].max(finish[j][k - 1]) + t;
        }
    }
    finish[chunks][hops]
}

#[test]
fn one_second_flow() {
    // 12.5 GB is 1e11 bits: one second on a 100 Gbps link
    let size = 12_500_000_000;
    let report = run(&line(1), &[flow(0, 1, 2, size)], &params(size, None)).unwrap();
    assert_eq!(report.sim_time_ns, 1_000_000_000);
    assert_eq!(report.bytes_delivered, size);
    assert_eq!(report.flows_completed, 1);
}

#[test]
fn hand_trace_three_chunks_three_hops() {
    let mut engine = Engine::new(params(CHUNK, None)).unwrap();
    let (report, trace) = engine.run_traced(&line(3), &[flow(0, 1, 4, 3 * CHUNK)]).unwrap();
    let mut got: Vec<(u32, u32, u64, u64)> = trace
        .transmissions
        .iter()
        .map(|x| (x.hop, x.chunk, x.start_ns, x.end_ns))
        .collect();
    got.sort();
    let expected = vec![
        (0, 0, 0, T),
        (0, 1, T, 2 * T),
        (0, 2, 2 * T, 3 * T),
        (1, 0, T, 2 * T),
        (1, 1, 2 * T, 3 * T),
        (1, 2, 3 * T, 4 * T),
        (2, 0, 2 * T, 3 * T),
        (2, 1, 3 * T, 4 * T),
        (2, 2, 4 * T, 5 * T),
    ];
    assert_eq!(got, expected);
    assert_eq!(trace.completions, [(0, 5 * T)]);
    assert_eq!(report.sim_time_ns, 5 * T);
    assert_eq!(pipeline_oracle(3, 3, T), 5 * T);
}

#[test]
fn pipeline_identity_small_grid() {
    for c in 1..=5u64 {
        for h in 1..=5u32 {
            let report = run(&line(h), &[flow(0, 1, h + 1, c * CHUNK)], &params(CHUNK, None)).unwrap();
            let oracle = pipeline_oracle(c as usize, h as usize, T);
            assert_eq!(report.sim_time_ns, oracle, "c={c} h={h}");
            assert_eq!(report.sim_time_ns, (c + u64::from(h) - 1) * T);
        }
    }
}

#[test]
fn transmission_time_rounds_up() {
    let p = SimParams {
        link_bitrate_bps: 3,
        ..SimParams::default()
    };
    // 8 bits at 3 bit/s = 2.666… s
    assert_eq!(p.transmission_ns(1), 2_666_666_667);
    assert_eq!(SimParams::default().transmission_ns(CHUNK), T);
}

#[test]
fn zero_flows() {
    let report = run(&graphs_for(&shell(3, 3), Arrangement::Full4), &[], &SimParams::default()).unwrap();
    assert_eq!(report, SimReport::default());
}

#[test]
fn rejects_bad_params() {
    for bad in [
        SimParams { link_bitrate_bps: 0, ..SimParams::default() },
        SimParams { chunk_bytes: 0, ..SimParams::default() },
        params(CHUNK, Some(CHUNK - 1)),
        SimParams { route_cache_cap: Some(0), ..SimParams::default() },
    ] {
        assert!(matches!(Engine::new(bad), Err(Error::Config { .. })));
    }
}

#[test]
fn zero_hop_flow_completes_immediately() {
    let report = run(&line(2), &[flow(0, 2, 2, 5000)], &params(CHUNK, None)).unwrap();
    assert_eq!((report.flows_completed, report.sim_time_ns, report.bytes_delivered), (1, 0, 5000));
}

#[test]
fn progress_callbacks() {
    let graphs = graphs_for(&shell(4, 4), Arrangement::Two);
    let flows: Vec<DataFlow> = (0..10).map(|k| flow(k, 1 + k as u32, 16 - k as u32, 40_000)).collect();
    let seen = RefCell::new(Vec::new());
    let mut engine = Engine::new(params(4096, None)).unwrap();
    engine.on_progress(|p| {
        seen.borrow_mut().push(p);
        Ok(())
    });
    let report = engine.run(&graphs, &flows).unwrap();
    drop(engine);
    let seen = seen.into_inner();
    assert_eq!(seen.len(), 10);
    for (k, p) in seen.iter().enumerate() {
        assert_eq!(p.completed, k as u64 + 1);
        assert_eq!(p.total, 10);
    }
    assert!(seen.windows(2).all(|w| w[0].sim_time_ns <= w[1].sim_time_ns));
    assert_eq!(seen.last().unwrap().sim_time_ns, report.sim_time_ns);

    let silent = run(&graphs, &flows, &params(4096, None)).unwrap();
    assert_eq!(silent, report);
}

#[test]
fn observer_error_aborts() {
    let graphs = line(2);
    let flows = [flow(0, 1, 3, 100), flow(1, 1, 3, 100)];
    let mut engine = Engine::new(params(CHUNK, None)).unwrap();
    engine.on_progress(|p| if p.completed == 1 { Err("stop".into()) } else { Ok(()) });
    assert_eq!(engine.run(&graphs, &flows), Err(Error::ObserverAborted("stop".into())));
}

#[test]
fn uncapped_runs_never_drop() {
    let graphs = graphs_for(&shell(4, 4), Arrangement::Full4);
    let flows: Vec<DataFlow> = (0..30).map(|k| flow(k, 1 + (k % 16) as u32, 1 + ((k * 7 + 3) % 16) as u32, 90_000)).collect();
    let flows: Vec<DataFlow> = flows.into_iter().filter(|f| f.src != f.dst).collect();
    let report = run(&graphs, &flows, &params(4096, None)).unwrap();
    assert_eq!(report.flows_dropped, 0);
    let total: u64 = flows.iter().map(|f| f.size_bytes).sum();
    assert_eq!(report.bytes_delivered, total);

    let loose = run(&graphs, &flows, &params(4096, Some(total))).unwrap();
    assert_eq!(loose, report);
}

#[test]
fn drop_policy_decisions() {
    assert_eq!(drop_policy(0, 10, None), Admission::Accept);
    assert_eq!(drop_policy(1 << 40, 10, None), Admission::Accept);
    assert_eq!(drop_policy(0, 10, Some(10)), Admission::Accept);
    assert_eq!(drop_policy(1, 10, Some(10)), Admission::DropFlow);
}

#[test]
fn collision_at_a_one_chunk_relay() {
    // 1 → 2 → 4 and 3 → 2 → 4 share relay 2. At t = T both first chunks reach
    // 2; flow 0's goes straight onto 2 → 4, flow 1's would make two chunks
    // buffered and is refused.
    let graphs = custom_graphs(4, &[(1, 2), (3, 2), (2, 4)]);
    let flows = [flow(0, 1, 4, 2 * CHUNK), flow(1, 3, 4, 2 * CHUNK)];
    let mut engine = Engine::new(params(CHUNK, Some(CHUNK))).unwrap();
    let (report, trace) = engine.run_traced(&graphs, &flows).unwrap();
    assert_eq!(trace.completions, [(0, 3 * T)]);
    assert_eq!(trace.drops, [(1, T)]);
    assert_eq!((report.flows_completed, report.flows_dropped), (1, 1));
    assert_eq!(report.bytes_delivered, 2 * CHUNK);
    assert_eq!(report.bytes_dropped, 2 * CHUNK);
    assert_eq!(report.sim_time_ns, 3 * T);

    let free = run(&graphs, &flows, &params(CHUNK, None)).unwrap();
    assert_eq!(free.flows_dropped, 0);
}

#[test]
fn unroutable_flows_are_dropped_not_fatal() {
    // 2 has no outgoing link
    let graphs = custom_graphs(3, &[(1, 2), (3, 1)]);
    let flows = [flow(0, 2, 1, 500), flow(1, 1, 2, 500), flow(2, 3, 9, 10)];
    let report = run(&graphs, &flows, &params(CHUNK, None)).unwrap();
    assert_eq!(report.unroutable, [0, 2]);
    assert_eq!((report.flows_dropped, report.flows_completed), (2, 1));
    assert_eq!(report.bytes_dropped, 510);
    assert_eq!(report.bytes_delivered, 500);
}

fn check_trace(trace: &SimTrace, report: &SimReport, flows: &[DataFlow], graphs_hops: &dyn Fn(&DataFlow) -> u64, p: &SimParams) {
    // link exclusivity
    let mut by_link: std::collections::BTreeMap<(u32, u32), Vec<(u64, u64)>> = Default::default();
    for x in &trace.transmissions {
        assert!(x.end_ns > x.start_ns);
        by_link.entry((x.from, x.to)).or_default().push((x.start_ns, x.end_ns));
    }
    for intervals in by_link.values_mut() {
        intervals.sort();
        assert!(intervals.windows(2).all(|w| w[0].1 <= w[1].0), "overlap {intervals:?}");
    }
    // causality: hop k+1 starts no earlier than hop k ends
    // (flow, chunk) → [(hop, start, end)]
    let mut per_chunk = std::collections::BTreeMap::<_, Vec<(u32, u64, u64)>>::new();
    for x in &trace.transmissions {
        per_chunk.entry((x.flow_id, x.chunk)).or_default().push((x.hop, x.start_ns, x.end_ns));
    }
    for hops in per_chunk.values_mut() {
        hops.sort();
        for w in hops.windows(2) {
            assert_eq!(w[1].0, w[0].0 + 1);
            assert!(w[1].1 >= w[0].2 && w[1].2 > w[0].2);
        }
    }
    // uncontended lower bound for every completed flow
    for &(id, _) in &trace.completions {
        let f = flows.iter().find(|f| f.flow_id == id).unwrap();
        let hops = graphs_hops(f);
        if hops == 0 {
            continue;
        }
        let first = p.transmission_ns(f.size_bytes.min(p.chunk_bytes));
        let bound = p.transmission_ns(f.size_bytes) + (hops - 1) * first;
        assert!(report.sim_time_ns >= bound);
    }
}

prop_compose! {
    fn scenario()(
        o in 3u32..7,
        q in 3u32..7,
        a in 0usize..4,
        chunk in 512u64..8192,
        cap_chunks in proptest::option::of(1u64..4),
        raw in proptest::collection::vec((0u32..1000, 0u32..1000, 1u64..60_000), 1..100),
    ) -> (u32, u32, Arrangement, SimParams, Vec<DataFlow>) {
        let n = o * q;
        let flows = raw
            .into_iter()
            .enumerate()
            .map(|(k, (s, d, size))| {
                let src = s % n + 1;
                let mut dst = d % n + 1;
                if dst == src {
                    dst = dst % n + 1;
                }
                flow(k as u64, src, dst, size)
            })
            .collect();
        let p = params(chunk, cap_chunks.map(|c| c * chunk));
        (o, q, Arrangement::ALL[a], p, flows)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conservation_determinism_and_timing((o, q, a, p, flows) in scenario()) {
        let graphs = graphs_for(&shell(o, q), a);
        let graph = graphs.values().next().unwrap();
        let mut engine = Engine::new(p).unwrap();
        let (report, trace) = engine.run_traced(&graphs, &flows).unwrap();
        let total: u64 = flows.iter().map(|f| f.size_bytes).sum();
        prop_assert_eq!(report.bytes_delivered + report.bytes_dropped, total);
        prop_assert_eq!(report.flows_completed + report.flows_dropped, report.flow_count);
        prop_assert!(report.flows_dropped <= report.flow_count);
        if p.buffer_cap_bytes.is_none() {
            prop_assert_eq!(report.flows_dropped, 0);
        }
        prop_assert_eq!(&run(&graphs, &flows, &p).unwrap(), &report);
        let hops = |f: &DataFlow| shortest_path(graph, f.src, f.dst).unwrap().hops() as u64;
        check_trace(&trace, &report, &flows, &hops, &p);
    }
}

#[test]
fn propagation_delay_shifts_each_hop() {
    const D: u64 = 37;
    for c in 1..=4u64 {
        for h in 1..=4u32 {
            let graphs = line(h);
            let delays = (1..=h).map(|k| ((k, k + 1), D)).collect();
            let mut engine = Engine::new(params(CHUNK, None)).unwrap();
            engine.with_link_delays(delays);
            let report = engine.run(&graphs, &[flow(0, 1, h + 1, c * CHUNK)]).unwrap();

            // chunk j may start hop k once it has arrived and chunk j-1 has
            // left; it arrives D after its transmission ends
            let (c_, h_) = (c as usize, h as usize);
            let mut end = vec![vec![0u64; h_ + 1]; c_ + 1];
            let mut arrive = vec![vec![0u64; h_ + 1]; c_ + 1];
            for j in 1..=c_ {
                for k in 1..=h_ {
                    let start = arrive[j][k - 1].max(end[j - 1][k]);
                    end[j][k] = start + T;
                    arrive[j][k] = end[j][k] + D;
                }
            }
            assert_eq!(report.sim_time_ns, arrive[c_][h_]);
            assert_eq!(report.sim_time_ns, (c + u64::from(h) - 1) * T + u64::from(h) * D);
        }
    }
}
