//! Scheme selection by name, and the certificate space and starting
//! assignments each scheme is searched over.

use plslab::constructions::build_wrapper_fakes;
use plslab::mst::MstScheme;
use plslab::oracles::{
    acyclic_space, mst_seeds, mst_space, st_seeds, st_space, universal_space, wrapped_space, CertSpace, CorpusItem,
    OracleError,
};
use plslab::schemes::{AcyclicScheme, StLScheme, StPScheme, UniversalScheme, WrappedScheme};
use plslab::{Budget, LabeledGraph, LanguageId, Scheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    Acyclic,
    St,
    StP,
    Mst,
    Universal(LanguageId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeSpec {
    pub base: Base,
    pub wrapped: bool,
}

impl SchemeSpec {
    pub fn parse(name: &str, lang: Option<LanguageId>) -> Result<SchemeSpec, String> {
        let lower = name.trim().to_ascii_lowercase();
        let (wrapped, base) = match lower.strip_prefix("wrapped-") {
            Some(rest) => (true, rest),
            None => (false, lower.as_str()),
        };
        let base = match base {
            "acyclic" => Base::Acyclic,
            "st" => Base::St,
            "stp" => Base::StP,
            "mst" => Base::Mst,
            "universal" => Base::Universal(lang.ok_or("the universal scheme needs --lang")?),
            _ => return Err(format!("unknown scheme {name:?}")),
        };
        let spec = SchemeSpec { base, wrapped };
        match lang {
            Some(l) if l != spec.language() => Err(format!("scheme {name} certifies {}, not {l}", spec.language())),
            _ => Ok(spec),
        }
    }

    pub fn language(&self) -> LanguageId {
        match self.base {
            Base::Acyclic => LanguageId::Acyclic,
            Base::St => LanguageId::StL,
            Base::StP => LanguageId::StP,
            Base::Mst => LanguageId::MstL,
            Base::Universal(l) => l,
        }
    }
}

/// Binds `$s` to a reference to the scheme `$scheme`, wrapped or not.
macro_rules! with_wrapping {
    ($wrapped:expr, $scheme:expr, |$s:ident| $body:expr) => {
        if $wrapped {
            let $s = &plslab::schemes::WrappedScheme::new($scheme);
            $body
        } else {
            let $s = &$scheme;
            $body
        }
    };
}

/// Evaluates `$body` with `$s` bound to the scheme a [`SchemeSpec`] names.
macro_rules! dispatch {
    ($spec:expr, |$s:ident| $body:expr) => {{
        use $crate::schemes::Base;
        let spec = $spec;
        match spec.base {
            Base::Acyclic => with_wrapping!(spec.wrapped, plslab::schemes::AcyclicScheme, |$s| $body),
            Base::St => with_wrapping!(spec.wrapped, plslab::schemes::StLScheme, |$s| $body),
            Base::StP => with_wrapping!(spec.wrapped, plslab::schemes::StPScheme, |$s| $body),
            Base::Mst => with_wrapping!(spec.wrapped, plslab::mst::MstScheme, |$s| $body),
            Base::Universal(l) => with_wrapping!(spec.wrapped, plslab::schemes::UniversalScheme::new(l), |$s| $body),
        }
    }};
}

/// A scheme together with the bounded space its adversary searches.
pub trait Searchable: Scheme {
    fn space(&self, inst: &LabeledGraph, budget: Budget) -> Result<CertSpace<Self::Cert>, OracleError>;

    /// Assignments worth trying before the exhaustive search.
    fn seeds(&self, _item: &CorpusItem, _budget: Budget) -> Vec<Vec<Self::Cert>> {
        Vec::new()
    }
}

impl Searchable for AcyclicScheme {
    fn space(&self, inst: &LabeledGraph, _budget: Budget) -> Result<CertSpace<u64>, OracleError> {
        Ok(acyclic_space(inst))
    }
}

impl Searchable for StLScheme {
    fn space(&self, inst: &LabeledGraph, _budget: Budget) -> Result<CertSpace<Self::Cert>, OracleError> {
        Ok(st_space(inst))
    }

    fn seeds(&self, item: &CorpusItem, budget: Budget) -> Vec<Vec<Self::Cert>> {
        st_seeds(item, budget)
    }
}

impl Searchable for StPScheme {
    fn space(&self, inst: &LabeledGraph, _budget: Budget) -> Result<CertSpace<Self::Cert>, OracleError> {
        Ok(st_space(inst))
    }
}

impl Searchable for MstScheme {
    fn space(&self, inst: &LabeledGraph, budget: Budget) -> Result<CertSpace<Self::Cert>, OracleError> {
        mst_space(inst, budget)
    }

    fn seeds(&self, item: &CorpusItem, _budget: Budget) -> Vec<Vec<Self::Cert>> {
        mst_seeds(item)
    }
}

impl Searchable for UniversalScheme {
    fn space(&self, inst: &LabeledGraph, budget: Budget) -> Result<CertSpace<Self::Cert>, OracleError> {
        universal_space(inst, self.language(), budget)
    }
}

impl<S: Searchable> Searchable for WrappedScheme<S> {
    fn space(&self, inst: &LabeledGraph, budget: Budget) -> Result<CertSpace<Self::Cert>, OracleError> {
        Ok(wrapped_space(inst, &self.inner.space(inst, budget)?))
    }

    /// Inner seeds (and fillers) with booleans faked bottom-up.
    fn seeds(&self, item: &CorpusItem, budget: Budget) -> Vec<Vec<Self::Cert>> {
        let inst = &item.instance;
        std::iter::once(None)
            .chain(self.inner.seeds(item, budget).into_iter().map(Some))
            .map(|inner| build_wrapper_fakes(self, inst, inner))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve_to_languages() {
        let st = SchemeSpec::parse("st", None).unwrap();
        assert_eq!(st.language(), LanguageId::StL);
        let w = SchemeSpec::parse("Wrapped-Universal", Some(LanguageId::Leader)).unwrap();
        assert!(w.wrapped);
        assert_eq!(w.base, Base::Universal(LanguageId::Leader));
        assert!(SchemeSpec::parse("universal", None).is_err());
        assert!(SchemeSpec::parse("mst", Some(LanguageId::StL)).is_err());
        assert!(SchemeSpec::parse("bogus", None).is_err());
    }
}
