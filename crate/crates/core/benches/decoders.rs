use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use polar_isc::code::encode;
use polar_isc::construction::{gaussian_approx_awgn, select_information_set};
use polar_isc::{rng, Algorithm, ChannelModel, DecoderConfig, DecoderSpec};
use rand::Rng;

fn decoders(c: &mut Criterion) {
    let code = select_information_set(&gaussian_approx_awgn(2.0, 0.5, 256).unwrap(), 128).unwrap();
    let channel = ChannelModel::biawgn_ebn0(2.5, 0.5).unwrap();
    let mut rng = rng::block_rng(1, 0, 0);
    let info: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2)).collect();
    let x = encode(&code.source_block(&info).unwrap(), &code).unwrap();
    let apps = channel.initial_log_app(&channel.transmit(&x, &mut rng)).unwrap();

    let mut group = c.benchmark_group("decode_n256");
    for spec in ["sc", "scl:L=8", "scl:L=32", "scs:L=32,D=1024", "sch:L=32,D=256", "sch:L=32,D=256,ptol=1e-5"] {
        let decoder: DecoderConfig = spec.parse::<DecoderSpec>().unwrap().resolve(code.k()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(spec), &decoder, |b, d| {
            b.iter(|| d.decode(&code, black_box(&apps)).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("sc_by_length");
    for n in [6u32, 8, 10] {
        let len = 1usize << n;
        let code = select_information_set(&gaussian_approx_awgn(2.0, 0.5, len).unwrap(), len / 2).unwrap();
        let apps = vec![[-0.2, -1.7]; len];
        let sc = DecoderConfig::new(Algorithm::Sc).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(len), &apps, |b, a| b.iter(|| sc.decode(&code, a).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, decoders);
criterion_main!(benches);
