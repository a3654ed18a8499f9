mod common;

use common::*;
use hopcrack::afh::*;
use proptest::prelude::*;

fn params(bits: u64, h_inc: u8, luc: u8) -> ConnectionParams {
    ConnectionParams {
        access_address: 0x8e89bed6,
        c_int_us: 100_000,
        h_inc,
        c_map: ChannelMap::from_bits(bits).unwrap(),
        luc,
    }
}

fn channels_of(p: &ConnectionParams, n: usize) -> Vec<u32> {
    hop_sequence(p, n)
        .unwrap()
        .into_iter()
        .map(|(_, c)| c.get() as u32)
        .collect()
}

fn map_bits() -> impl Strategy<Value = u64> {
    (0u64..(1 << 37)).prop_filter("two used channels", |b| b.count_ones() >= 2)
}

#[test]
fn naive_reference_sanity() {
    let full = [true; 37];
    assert_eq!(naive_channels(&full, 7, 0, 5), vec![7, 14, 21, 28, 35]);
    let nine = used_from_bits(0x1ff);
    assert_eq!(naive_channels(&nine, 16, 0, 1), vec![7]);
    assert_eq!(naive_inverse(2), Some(19));
}

#[test]
fn spec_examples() {
    assert_eq!(
        channels_of(&params(ChannelMap::FULL.bits(), 7, 0), 5),
        vec![7, 14, 21, 28, 35]
    );
    assert_eq!(unmapped_next(HopState::new(30).unwrap(), 7).unwrap(), 0);
    assert_eq!(unmapped_next(HopState::new(36).unwrap(), 16).unwrap(), 15);
    assert_eq!(
        remap(16, ChannelMap::from_bits(0x1ff).unwrap())
            .unwrap()
            .get(),
        7
    );
    assert_eq!(
        remap(3, ChannelMap::from_bits(0b1100).unwrap())
            .unwrap()
            .get(),
        3
    );
    let (ch, st) = select_next_channel(
        HopState::new(0).unwrap(),
        16,
        ChannelMap::from_bits(0x1ff).unwrap(),
    )
    .unwrap();
    assert_eq!((ch.get(), st.luc), (7, 16));
    assert_eq!(mod_inverse(2).unwrap(), 19);
    assert_eq!(mod_inverse(36).unwrap(), 36);
    assert!(mod_inverse(37).is_err());
}

#[test]
fn every_popcount_two_map_and_increment() {
    for a in 0..37u64 {
        for b in a + 1..37 {
            let bits = 1 << a | 1 << b;
            let used = used_from_bits(bits);
            for h in 5..=16u8 {
                for luc in [0u8, 17, 36] {
                    let p = params(bits, h, luc);
                    assert_eq!(
                        channels_of(&p, 74),
                        naive_channels(&used, h as u32, luc as u32, 74)
                    );
                }
            }
        }
    }
}

#[test]
fn unmapped_period_is_37_for_all_increments_and_starts() {
    for h in 5..=16u8 {
        for luc in 0..37u8 {
            let seq: Vec<u32> = naive_unmapped(h as u32, luc as u32, 111);
            assert_eq!(smallest_period(&seq), 37, "h_inc={h} luc={luc}");
            let mut state = HopState::new(luc).unwrap();
            for _ in 0..37 {
                state = select_next_channel(state, h, ChannelMap::FULL).unwrap().1;
            }
            assert_eq!(state.luc, luc);
        }
    }
}

#[test]
fn inverse_exhaustive() {
    for x in 1..37i64 {
        let y = mod_inverse(x).unwrap() as i64;
        assert_eq!(x * y % 37, 1);
        assert_eq!(Some(y as u32), naive_inverse(x as u32));
        assert_eq!(mod_inverse(x - 37).unwrap() as i64, y);
    }
}

#[test]
fn validation_examples() {
    assert!(validate_params(&ConnectionParams {
        c_int_us: 7500,
        h_inc: 5,
        ..params(ChannelMap::FULL.bits(), 7, 0)
    })
    .is_ok());
    let v = param_violations(&params(ChannelMap::FULL.bits(), 4, 0));
    assert_eq!(v, vec![ParamViolation::HopIncrementOutOfRange(4)]);
    let v = param_violations(&ConnectionParams {
        c_int_us: 100_001,
        ..params(ChannelMap::FULL.bits(), 7, 0)
    });
    assert_eq!(v, vec![ParamViolation::IntervalNotOnGrid(100_001)]);
    assert!(v[0].to_string().contains("c_int_us"));
    assert!(ChannelMap::from_bits(1 << 5).unwrap().check().is_err());
}

#[test]
fn fixture_round_trip() {
    let seq = hop_sequence(&params(0x1ff, 7, 0), 40).unwrap();
    let text = format_hop_fixture(&seq);
    assert!(text.starts_with("0,7\n"));
    assert_eq!(parse_hop_fixture(&text).unwrap(), seq);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_naive_reference(bits in map_bits(), h in 5u8..=16, luc in 0u8..37, n in 1usize..200) {
        let used = used_from_bits(bits);
        prop_assert_eq!(channels_of(&params(bits, h, luc), n), naive_channels(&used, h as u32, luc as u32, n));
    }

    #[test]
    fn remap_lands_on_a_used_channel(bits in map_bits(), unmapped in 0u8..37) {
        let map = ChannelMap::from_bits(bits).unwrap();
        prop_assert!(map.is_used(remap(unmapped, map).unwrap()));
    }

    #[test]
    fn one_period_visits_every_unmapped_value(h in 5u8..=16, luc in 0u8..37) {
        let mut seen = naive_unmapped(h as u32, luc as u32, 37);
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..37).collect::<Vec<u32>>());
    }

    #[test]
    fn unmapped_after_walks_both_ways(from in 0u8..37, h in 5u8..=16, hops in -200i64..200) {
        let there = unmapped_after(from, h, hops);
        prop_assert_eq!(unmapped_after(there, h, -hops), from);
        if hops >= 0 {
            let expect = naive_unmapped(h as u32, from as u32, hops as usize).last().copied().unwrap_or(from as u32);
            prop_assert_eq!(there as u32, expect);
        }
    }

    #[test]
    fn map_hex_round_trip(bits in map_bits()) {
        let map = ChannelMap::from_bits(bits).unwrap();
        prop_assert_eq!(ChannelMap::parse_hex(&map.to_hex()).unwrap(), map);
        prop_assert_eq!(map.used_list().len() as u32, map.popcount());
    }
}
